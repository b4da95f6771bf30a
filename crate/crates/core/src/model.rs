//! Whole-model description: a lattice, a set of rated transitions, and an
//! optional restriction of the state space.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::logic::TransitionSpec;
use crate::scalar::Scalar;
use crate::state::{LatticeSpec, State};

/// How the state space is cut down before solving.
#[derive(Debug, Clone, PartialEq)]
pub enum Restriction {
    /// Keep all `m^N` configurations.
    None,
    /// Keep the reachability closure of the empty lattice under the model's
    /// transitions. `width` documents the block width that motivates the
    /// restriction; the closure itself is computed from the transitions.
    Footprint { width: usize },
    /// Keep exactly these configurations.
    Explicit { states: Vec<State> },
}

/// A lattice, its transitions and the state-space restriction.
#[derive(Debug, Clone)]
pub struct ModelSpec<T> {
    lattice: LatticeSpec,
    transitions: Vec<TransitionSpec<T>>,
    restriction: Restriction,
}

impl<T: Scalar> ModelSpec<T> {
    pub fn new(
        lattice: LatticeSpec,
        transitions: Vec<TransitionSpec<T>>,
        restriction: Restriction,
    ) -> Result<Self> {
        if transitions.is_empty() {
            return Err(Error::EmptyModel);
        }
        for t in &transitions {
            if t.lattice() != &lattice {
                return Err(Error::InvalidTransition(format!(
                    "`{}` was built for a different lattice",
                    t.name()
                )));
            }
        }
        if !transitions.iter().any(|t| t.rate() > T::zero()) {
            return Err(Error::AllRatesZero);
        }
        match &restriction {
            Restriction::None => {}
            Restriction::Footprint { width } => {
                if *width == 0 || *width > lattice.sites() {
                    return Err(Error::IndexOutOfRange {
                        what: "footprint width",
                        index: *width,
                        limit: lattice.sites(),
                    });
                }
            }
            Restriction::Explicit { states } => {
                if states.is_empty() {
                    return Err(Error::EmptyStateSet);
                }
                for s in states {
                    // re-validate against this lattice
                    lattice.state(s.digits().to_vec())?;
                }
            }
        }
        Ok(Self { lattice, transitions, restriction })
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn transitions(&self) -> &[TransitionSpec<T>] {
        &self.transitions
    }

    pub fn restriction(&self) -> &Restriction {
        &self.restriction
    }

    /// Sum of all transition rates (the uniformization constant).
    pub fn rate_sum(&self) -> T {
        self.transitions.iter().map(|t| t.rate()).sum()
    }
}

/// Normalized step probabilities `p(τ) = rate(τ) / Σ rates`, in transition
/// order. Zero-rate transitions get probability zero.
pub fn normalize_rates<T: Scalar>(model: &ModelSpec<T>) -> Result<Vec<T>> {
    let sigma = model.rate_sum();
    if sigma <= T::zero() {
        return Err(Error::AllRatesZero);
    }
    Ok(model.transitions().iter().map(|t| t.rate() / sigma).collect())
}

/// The allowable configurations as 0-based delta positions, ascending.
///
/// With no restriction this is all of `0..m^N`. A footprint restriction is
/// the closure of the empty lattice under every positive-rate transition.
/// An explicit list is validated and sorted.
pub fn allowable_states<T: Scalar>(model: &ModelSpec<T>) -> Result<Vec<usize>> {
    let lattice = model.lattice();
    let states = lattice.state_count();
    let members: Vec<usize> = match model.restriction() {
        Restriction::None => (0..states).collect(),
        Restriction::Explicit { states: list } => {
            let mut set: Vec<usize> =
                list.iter().map(|s| lattice.delta_index(s) - 1).collect();
            set.sort_unstable();
            set.dedup();
            set
        }
        Restriction::Footprint { .. } => {
            let empty = lattice.empty_state();
            let mut seen: HashSet<usize> = HashSet::new();
            seen.insert(lattice.dec(&empty));
            let mut frontier = vec![empty];
            let mut scratch = Vec::with_capacity(lattice.sites());
            while let Some(s) = frontier.pop() {
                for t in model.transitions() {
                    if t.rate() <= T::zero() {
                        continue;
                    }
                    t.apply_digits(s.digits(), &mut scratch);
                    let dec = crate::state::dec_of(&scratch, lattice.levels());
                    if seen.insert(dec) {
                        frontier.push(lattice.state_from_dec(dec)?);
                    }
                }
            }
            let mut set: Vec<usize> = seen.into_iter().map(|dec| states - 1 - dec).collect();
            set.sort_unstable();
            set
        }
    };
    if members.is_empty() {
        return Err(Error::EmptyStateSet);
    }
    Ok(members)
}

/// Checks that every transition maps the given state set into itself. The
/// error names the escaping state and the transition responsible.
pub fn verify_closed<T: Scalar>(model: &ModelSpec<T>, members: &[usize]) -> Result<()> {
    let lattice = model.lattice();
    let states = lattice.state_count();
    let mut scratch = Vec::with_capacity(lattice.sites());
    for &pos in members {
        let s = lattice.state_from_dec(states - 1 - pos)?;
        for t in model.transitions() {
            if t.rate() <= T::zero() {
                continue;
            }
            t.apply_digits(s.digits(), &mut scratch);
            let succ_pos = states - 1 - crate::state::dec_of(&scratch, lattice.levels());
            if members.binary_search(&succ_pos).is_err() {
                let succ = lattice.state(scratch.clone())?;
                return Err(Error::ClosureViolation {
                    state: s.label(lattice),
                    transition: t.name().to_string(),
                    successor: succ.label(lattice),
                });
            }
        }
    }
    Ok(())
}
