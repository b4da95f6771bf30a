//! Stationary observables: per-site species densities and transition
//! throughputs.

use crate::error::{Error, Result};
use crate::model::{normalize_rates, ModelSpec};
use crate::scalar::Scalar;
use crate::state::LatticeSpec;
use crate::stochastic::Distribution;

/// Average density of species `i` at site `j`: the stationary probability
/// of finding a particle of that species there.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    species: usize,
    sites: usize,
    data: Vec<T>,
}

impl<T: Scalar> DensityMatrix<T> {
    pub fn species_count(&self) -> usize {
        self.species
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Density of `species` (1-based) at `site` (1-based).
    pub fn density(&self, species: usize, site: usize) -> T {
        self.data[(species - 1) * self.sites + (site - 1)]
    }

    /// Total occupation probability of a site, summed over species.
    pub fn site_occupancy(&self, site: usize) -> T {
        (1..=self.species).map(|i| self.density(i, site)).sum()
    }
}

/// Computes the density matrix of a stationary distribution by summing the
/// probability of every configuration holding species `i` at site `j`.
pub fn density_profile<T: Scalar>(
    pi: &Distribution<T>,
    lattice: &LatticeSpec,
) -> Result<DensityMatrix<T>> {
    if pi.ordering().full_states() != lattice.state_count() {
        return Err(Error::OrderingMismatch);
    }
    let sites = lattice.sites();
    let species = lattice.species();
    let mut data = vec![T::zero(); species * sites];
    for (i, &p) in pi.probs().iter().enumerate() {
        let full_pos = pi.ordering().to_full_position(i);
        let state = lattice.state_from_dec(lattice.state_count() - 1 - full_pos)?;
        for (j, &x) in state.digits().iter().enumerate() {
            if x > 0 {
                data[(x - 1) * sites + j] = data[(x - 1) * sites + j] + p;
            }
        }
    }
    Ok(DensityMatrix { species, sites, data })
}

/// Stationary throughput of every transition: `J(τ) = p(τ) · Σ π(s)` over
/// the configurations `s` that `τ` actually changes. Returned in transition
/// order as `(name, current)` pairs.
pub fn site_current<T: Scalar>(
    pi: &Distribution<T>,
    model: &ModelSpec<T>,
) -> Result<Vec<(String, T)>> {
    let lattice = model.lattice();
    if pi.ordering().full_states() != lattice.state_count() {
        return Err(Error::OrderingMismatch);
    }
    let probs = normalize_rates(model)?;
    let mut currents: Vec<(String, T)> = model
        .transitions()
        .iter()
        .map(|t| (t.name().to_string(), T::zero()))
        .collect();
    for (i, &p) in pi.probs().iter().enumerate() {
        if p == T::zero() {
            continue;
        }
        let full_pos = pi.ordering().to_full_position(i);
        let state = lattice.state_from_dec(lattice.state_count() - 1 - full_pos)?;
        for (k, t) in model.transitions().iter().enumerate() {
            if probs[k] > T::zero() && t.changes(state.digits()) {
                currents[k].1 = currents[k].1 + probs[k] * p;
            }
        }
    }
    Ok(currents)
}
