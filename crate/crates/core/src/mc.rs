//! Monte Carlo cross-check of the stationary distribution.
//!
//! The simulator runs the uniformized chain: every step draws one
//! transition from the full set with its normalized probability `p(τ)` and
//! applies it, so a disabled transition acts as a self-loop. This matches
//! the assembled transition matrix exactly; a jump chain that renormalizes
//! over enabled transitions only would converge to a differently weighted
//! stationary law and is deliberately not what runs here.
//!
//! Trajectories are reproducible: the generator is ChaCha12 seeded from the
//! config, with one independent stream per chain, so identical `(model,
//! config)` pairs give bit-identical counts regardless of thread count.

use std::collections::BTreeMap;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::model::{normalize_rates, ModelSpec};
use crate::scalar::Scalar;
use crate::state::dec_of;
use crate::stochastic::{Distribution, StateOrdering};

/// Name of the generator, recorded in run metadata.
pub const RNG_NAME: &str = "chacha12";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    /// Total steps per chain.
    pub steps: u64,
    /// Steps discarded before counting.
    pub burn_in: u64,
    pub seed: u64,
    /// Independent chains; counts are pooled.
    pub chains: usize,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::InvalidConfig("need at least one step".into()));
        }
        if self.burn_in >= self.steps {
            return Err(Error::InvalidConfig(format!(
                "burn-in {} must be smaller than steps {}",
                self.burn_in, self.steps
            )));
        }
        if self.chains == 0 {
            return Err(Error::InvalidConfig("need at least one chain".into()));
        }
        Ok(())
    }
}

/// Post-burn-in visit counts, keyed by the configuration's decimal value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalDistribution {
    states: usize,
    counts: BTreeMap<usize, u64>,
    total: u64,
}

impl EmpiricalDistribution {
    /// Visit counts by decimal state value, ascending.
    pub fn counts(&self) -> &BTreeMap<usize, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn state_count(&self) -> usize {
        self.states
    }

    /// Visit frequencies as a distribution over the given ordering. Fails if
    /// a visited configuration is not indexed by the ordering.
    pub fn normalized<T: Scalar>(&self, ordering: StateOrdering) -> Result<Distribution<T>> {
        if ordering.full_states() != self.states {
            return Err(Error::OrderingMismatch);
        }
        let total = T::from_u64(self.total)
            .ok_or_else(|| Error::InvalidConfig("sample count overflows the scalar".into()))?;
        let mut probs = vec![T::zero(); ordering.dim()];
        for (&dec, &count) in &self.counts {
            let full_pos = self.states - 1 - dec;
            let local = ordering.position_of(full_pos).ok_or_else(|| {
                Error::InvalidState(format!(
                    "visited state with decimal value {dec} is outside the ordering"
                ))
            })?;
            probs[local] = T::from_u64(count).unwrap() / total;
        }
        Distribution::new(probs, ordering)
    }

    fn merge(&mut self, other: EmpiricalDistribution) {
        for (dec, count) in other.counts {
            *self.counts.entry(dec).or_insert(0) += count;
        }
        self.total += other.total;
    }
}

fn uniform_unit(rng: &mut ChaCha12Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn run_chain<T: Scalar>(
    model: &ModelSpec<T>,
    cumulative: &[f64],
    steps: u64,
    burn_in: u64,
    seed: u64,
    stream: u64,
) -> EmpiricalDistribution {
    let lattice = model.lattice();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);

    let mut digits = vec![0usize; lattice.sites()];
    let mut scratch = Vec::with_capacity(lattice.sites());
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    let transitions = model.transitions();

    for step in 1..=steps {
        let u = uniform_unit(&mut rng);
        let mut pick = cumulative.len() - 1;
        for (k, &edge) in cumulative.iter().enumerate() {
            if u < edge {
                pick = k;
                break;
            }
        }
        transitions[pick].apply_digits(&digits, &mut scratch);
        std::mem::swap(&mut digits, &mut scratch);
        if step > burn_in {
            *counts.entry(dec_of(&digits, lattice.levels())).or_insert(0) += 1;
        }
    }

    EmpiricalDistribution {
        states: lattice.state_count(),
        counts,
        total: steps - burn_in,
    }
}

/// Simulates the uniformized chain from the empty lattice and returns the
/// pooled post-burn-in visit counts. Chains run sequentially.
pub fn simulate<T: Scalar>(model: &ModelSpec<T>, cfg: &SimConfig) -> Result<EmpiricalDistribution> {
    simulate_with_threads(model, cfg, 1)
}

/// Like [`simulate`], running up to `max_threads` chains concurrently. The
/// result is identical to the sequential run.
pub fn simulate_with_threads<T: Scalar>(
    model: &ModelSpec<T>,
    cfg: &SimConfig,
    max_threads: usize,
) -> Result<EmpiricalDistribution> {
    cfg.validate()?;
    let probs = normalize_rates(model)?;
    let cumulative: Vec<f64> = probs
        .iter()
        .scan(0.0f64, |acc, p| {
            *acc += p.to_f64().unwrap_or(0.0);
            Some(*acc)
        })
        .collect();

    let threads = max_threads.max(1).min(cfg.chains);
    let chain_results: Vec<EmpiricalDistribution> = if threads <= 1 || cfg.chains == 1 {
        (0..cfg.chains)
            .map(|c| run_chain(model, &cumulative, cfg.steps, cfg.burn_in, cfg.seed, c as u64))
            .collect()
    } else {
        let mut slots: Vec<Option<EmpiricalDistribution>> = vec![None; cfg.chains];
        std::thread::scope(|scope| {
            for (worker, chunk) in slots.chunks_mut(cfg.chains.div_ceil(threads)).enumerate() {
                let cumulative = &cumulative;
                let base = worker * cfg.chains.div_ceil(threads);
                scope.spawn(move || {
                    for (off, slot) in chunk.iter_mut().enumerate() {
                        let chain = (base + off) as u64;
                        *slot = Some(run_chain(
                            model,
                            cumulative,
                            cfg.steps,
                            cfg.burn_in,
                            cfg.seed,
                            chain,
                        ));
                    }
                });
            }
        });
        slots.into_iter().map(|s| s.expect("chain completed")).collect()
    };

    let mut merged: Option<EmpiricalDistribution> = None;
    for r in chain_results {
        match merged.as_mut() {
            None => merged = Some(r),
            Some(m) => m.merge(r),
        }
    }
    Ok(merged.expect("at least one chain"))
}

/// Total variation distance `½ Σ |a_i − b_i|`; orderings must match.
pub fn total_variation<T: Scalar>(a: &Distribution<T>, b: &Distribution<T>) -> Result<T> {
    let two = T::from_u32(2).unwrap();
    Ok(a.l1_distance(b)? / two)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{standard_transition, MvFunction, TransitionKind, TransitionSpec};
    use crate::model::Restriction;
    use crate::state::LatticeSpec;

    fn two_site_tasep() -> ModelSpec<f64> {
        let lattice = LatticeSpec::new(2, 2).unwrap();
        let transitions = vec![
            standard_transition(&TransitionKind::LeftEntry, &lattice, 0.2).unwrap(),
            standard_transition(&TransitionKind::RightExit, &lattice, 0.3).unwrap(),
            standard_transition(&TransitionKind::HopRight { site: 1 }, &lattice, 0.5).unwrap(),
        ];
        ModelSpec::new(lattice, transitions, Restriction::None).unwrap()
    }

    #[test]
    fn identical_seeds_reproduce_counts() {
        let model = two_site_tasep();
        let cfg = SimConfig { steps: 20_000, burn_in: 1_000, seed: 7, chains: 2 };
        let a = simulate(&model, &cfg).unwrap();
        let b = simulate(&model, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn threading_does_not_change_counts() {
        let model = two_site_tasep();
        let cfg = SimConfig { steps: 10_000, burn_in: 500, seed: 11, chains: 4 };
        let seq = simulate_with_threads(&model, &cfg, 1).unwrap();
        let par = simulate_with_threads(&model, &cfg, 4).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn self_loop_model_stays_put() {
        let lattice = LatticeSpec::new(2, 2).unwrap();
        let fns = (1..=2)
            .map(|i| MvFunction::identity(&lattice, i).unwrap())
            .collect();
        let t = TransitionSpec::new("noop", 1.0f64, lattice, fns).unwrap();
        let model = ModelSpec::new(lattice, vec![t], Restriction::None).unwrap();
        let cfg = SimConfig { steps: 1_000, burn_in: 0, seed: 1, chains: 1 };
        let emp = simulate(&model, &cfg).unwrap();
        assert_eq!(emp.counts().len(), 1);
        assert_eq!(emp.counts()[&0], 1_000);
    }

    #[test]
    fn config_validation() {
        let model = two_site_tasep();
        let bad = SimConfig { steps: 100, burn_in: 100, seed: 0, chains: 1 };
        assert!(simulate(&model, &bad).is_err());
        let no_chains = SimConfig { steps: 100, burn_in: 0, seed: 0, chains: 0 };
        assert!(simulate(&model, &no_chains).is_err());
    }

    #[test]
    fn total_variation_bounds() {
        let ord = StateOrdering::full(4);
        let a = Distribution::<f64>::new(vec![1.0, 0.0, 0.0, 0.0], ord.clone()).unwrap();
        let b = Distribution::new(vec![0.0, 0.0, 0.0, 1.0], ord.clone()).unwrap();
        assert_eq!(total_variation(&a, &a).unwrap(), 0.0);
        assert_eq!(total_variation(&a, &b).unwrap(), 1.0);

        // mismatched orderings are rejected
        let restricted = Distribution::new(
            vec![0.5, 0.5],
            StateOrdering::restricted(4, vec![0, 3]),
        )
        .unwrap();
        assert!(total_variation(&a, &restricted).is_err());
    }

    #[test]
    fn two_site_tv_against_exact_pi() {
        // ½(|0.16−0.25| + |0.24−0.25|·2 + |0.36−0.25|) = 0.11
        let ord = StateOrdering::full(4);
        let pi = Distribution::<f64>::new(vec![0.16, 0.24, 0.24, 0.36], ord.clone()).unwrap();
        let uniform = Distribution::uniform(ord);
        let tv = total_variation(&pi, &uniform).unwrap();
        assert!((tv - 0.11).abs() < 1e-12);
    }
}
