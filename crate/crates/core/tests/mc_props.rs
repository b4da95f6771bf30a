//! Statistical checks of the Monte Carlo oracle against the assembled chain.
//! All random draws are seeded, so every statistic here is deterministic.

mod common;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use stpx_core::{
    allowable_states, assemble, normalize_rates, simulate, standard_transition, steady_state,
    total_variation, Distribution, LatticeSpec, Method, ModelSpec, Restriction, SimConfig,
    SolveOptions, StateOrdering, TransitionKind,
};

fn two_site_tasep() -> ModelSpec<f64> {
    let lattice = LatticeSpec::new(2, 2).unwrap();
    let transitions = vec![
        standard_transition(&TransitionKind::LeftEntry, &lattice, 0.2).unwrap(),
        standard_transition(&TransitionKind::RightExit, &lattice, 0.3).unwrap(),
        standard_transition(&TransitionKind::HopRight { site: 1 }, &lattice, 0.5).unwrap(),
    ];
    ModelSpec::new(lattice, transitions, Restriction::None).unwrap()
}

fn three_site_tasep() -> ModelSpec<f64> {
    let lattice = LatticeSpec::new(3, 2).unwrap();
    let transitions = vec![
        standard_transition(&TransitionKind::LeftEntry, &lattice, 1.0).unwrap(),
        standard_transition(&TransitionKind::RightExit, &lattice, 1.0).unwrap(),
        standard_transition(&TransitionKind::HopRight { site: 1 }, &lattice, 1.0).unwrap(),
        standard_transition(&TransitionKind::HopRight { site: 2 }, &lattice, 1.0).unwrap(),
    ];
    ModelSpec::new(lattice, transitions, Restriction::None).unwrap()
}

#[test]
fn empirical_distribution_approaches_exact_pi() {
    let model = two_site_tasep();
    let cfg = SimConfig { steps: 1_000_000, burn_in: 10_000, seed: 2024, chains: 1 };
    let emp = simulate(&model, &cfg).unwrap();
    let empirical: Distribution<f64> = emp.normalized(StateOrdering::full(4)).unwrap();
    let exact = Distribution::new(vec![0.16, 0.24, 0.24, 0.36], StateOrdering::full(4)).unwrap();
    let tv = total_variation(&empirical, &exact).unwrap();
    assert!(tv <= 0.01, "TV distance {tv} above 0.01");
}

#[test]
fn distinct_seeds_same_limit() {
    let model = two_site_tasep();
    let a = simulate(&model, &SimConfig { steps: 300_000, burn_in: 5_000, seed: 1, chains: 1 })
        .unwrap();
    let b = simulate(&model, &SimConfig { steps: 300_000, burn_in: 5_000, seed: 2, chains: 1 })
        .unwrap();
    assert_ne!(a.counts(), b.counts(), "different seeds must explore differently");
    let da: Distribution<f64> = a.normalized(StateOrdering::full(4)).unwrap();
    let db: Distribution<f64> = b.normalized(StateOrdering::full(4)).unwrap();
    let tv = total_variation(&da, &db).unwrap();
    assert!(tv <= 0.02, "seeds diverge in the limit: TV {tv}");
}

#[test]
fn one_step_frequencies_match_the_assembled_column() {
    // chi-square sanity check: single-step successor frequencies from a
    // fixed configuration against that configuration's matrix column
    let model = three_site_tasep();
    let lattice = *model.lattice();
    let matrix = assemble(&model).unwrap();
    let probs = normalize_rates(&model).unwrap();
    let cumulative: Vec<f64> = probs
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();

    let start = lattice.state(vec![1, 0, 1]).unwrap();
    let column = lattice.delta_index(&start) - 1;
    let expected: Vec<(usize, f64)> = matrix.column(column).collect();

    let samples = 100_000usize;
    let mut rng = ChaCha12Rng::seed_from_u64(99);
    let mut counts = vec![0u64; lattice.state_count()];
    let mut scratch = Vec::new();
    for _ in 0..samples {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let pick = cumulative.iter().position(|&edge| u < edge).unwrap_or(probs.len() - 1);
        model.transitions()[pick].apply_digits(start.digits(), &mut scratch);
        let succ = lattice.state(scratch.clone()).unwrap();
        counts[lattice.delta_index(&succ) - 1] += 1;
    }

    // observed support must equal the column's support
    for (pos, &c) in counts.iter().enumerate() {
        let in_column = expected.iter().any(|&(r, _)| r == pos);
        assert_eq!(c > 0, in_column, "support mismatch at delta position {pos}");
    }

    let chi2: f64 = expected
        .iter()
        .map(|&(row, p)| {
            let exp = p * samples as f64;
            let obs = counts[row] as f64;
            (obs - exp).powi(2) / exp
        })
        .sum();
    // critical values at significance 0.001 for dof 1..=6
    let critical = [10.83, 13.82, 16.27, 18.47, 20.52, 22.46];
    let dof = expected.len() - 1;
    assert!(
        chi2 < critical[dof - 1],
        "chi-square {chi2} exceeds the {dof}-dof critical value"
    );
}

#[test]
fn restricted_model_never_leaves_the_allowable_set() {
    let lattice = LatticeSpec::new(5, 2).unwrap();
    let width = 2;
    let mut transitions = vec![
        standard_transition(&TransitionKind::FootprintEntry { width }, &lattice, 1.0).unwrap(),
        standard_transition(&TransitionKind::FootprintExit { width }, &lattice, 1.0).unwrap(),
    ];
    for head in width..5 {
        transitions.push(
            standard_transition(&TransitionKind::FootprintHop { width, head }, &lattice, 1.0)
                .unwrap(),
        );
    }
    let model =
        ModelSpec::new(lattice, transitions, Restriction::Footprint { width }).unwrap();
    let members = allowable_states(&model).unwrap();
    let allowed_decs: Vec<usize> = members
        .iter()
        .map(|&pos| lattice.state_count() - 1 - pos)
        .collect();

    let emp = simulate(&model, &SimConfig { steps: 50_000, burn_in: 0, seed: 5, chains: 2 })
        .unwrap();
    for &dec in emp.counts().keys() {
        assert!(allowed_decs.contains(&dec), "visited disallowed state {dec}");
    }

    // and the restricted ordering accepts the visit counts
    let ordering = StateOrdering::restricted(lattice.state_count(), members);
    let dist: Distribution<f64> = emp.normalized(ordering).unwrap();
    assert!((dist.probs().iter().sum::<f64>() - 1.0).abs() < 1e-10);
}

#[test]
fn empirical_tv_against_solver_pi_on_three_sites() {
    let model = three_site_tasep();
    let matrix = assemble(&model).unwrap();
    let pi = steady_state(&matrix, Method::Power, &SolveOptions::default())
        .unwrap()
        .distribution;
    let cfg = SimConfig { steps: 1_000_000, burn_in: 10_000, seed: 31, chains: 1 };
    let emp: Distribution<f64> = simulate(&model, &cfg)
        .unwrap()
        .normalized(StateOrdering::full(8))
        .unwrap();
    let tv = total_variation(&emp, &pi).unwrap();
    assert!(tv <= 0.02, "TV {tv} above 0.02");
}
