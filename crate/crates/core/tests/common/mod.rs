//! Shared test support: an independent state-to-state oracle for every
//! transition kind (written straight from the transition semantics, with no
//! logical functions, structure matrices or gates involved), lattice sweeps,
//! and the model builders the suites solve against.

#![allow(dead_code)]

use stpx_core::{
    build_mv_function, standard_transition, stp_logical, ConditionSet, LatticeSpec, LogicalMatrix,
    ModelSpec, MvFunction, Restriction, TransitionKind, TransitionSpec,
};

/// Applies `kind` to `digits` directly. The implementation layer must agree
/// with this on every configuration.
pub fn oracle_apply(kind: &TransitionKind, digits: &[usize]) -> Vec<usize> {
    use TransitionKind::*;
    let n = digits.len();
    let mut out = digits.to_vec();
    let hop = |src0: usize, dst0: usize, out: &mut Vec<usize>| {
        if out[src0] != 0 && out[dst0] == 0 {
            out[dst0] = out[src0];
            out[src0] = 0;
        }
    };
    match *kind {
        LeftEntry => {
            if out[0] == 0 {
                out[0] = 1;
            }
        }
        RightEntry => {
            if out[n - 1] == 0 {
                out[n - 1] = 1;
            }
        }
        LeftExit => {
            if out[0] == 1 {
                out[0] = 0;
            }
        }
        RightExit => {
            if out[n - 1] == 1 {
                out[n - 1] = 0;
            }
        }
        Attach { site } => {
            if out[site - 1] == 0 {
                out[site - 1] = 1;
            }
        }
        Detach { site } => {
            if out[site - 1] == 1 {
                out[site - 1] = 0;
            }
        }
        HopRight { site } | GenericHop { site } => hop(site - 1, site, &mut out),
        HopLeft { site } => hop(site - 1, site - 2, &mut out),
        LongRangeHop { site, length } => {
            let dst = (site as isize + length - 1) as usize;
            hop(site - 1, dst, &mut out);
        }
        PeriodicWrapHop => hop(n - 1, 0, &mut out),
        SpeciesEntry { species } => {
            if out[0] == 0 {
                out[0] = species;
            }
        }
        SpeciesExit { species } => {
            if out[n - 1] == species {
                out[n - 1] = 0;
            }
        }
        SpeciesAttach { species, site } => {
            if out[site - 1] == 0 {
                out[site - 1] = species;
            }
        }
        SpeciesDetach { species, site } => {
            if out[site - 1] == species {
                out[site - 1] = 0;
            }
        }
        Switch { left, right, site } => {
            if out[site - 1] == left && out[site] == right {
                out[site - 1] = right;
                out[site] = left;
            }
        }
        FootprintEntry { width } => {
            if out[..width].iter().all(|&x| x == 0) {
                out[..width].fill(1);
            }
        }
        FootprintExit { width } => {
            if out[n - width..].iter().all(|&x| x == 1) {
                out[n - width..].fill(0);
            }
        }
        FootprintHop { width, head } => {
            let tail0 = head - width;
            if out[tail0..head].iter().all(|&x| x == 1) && out[head] == 0 {
                out[tail0] = 0;
                out[head] = 1;
            }
        }
    }
    out
}

/// Every parameterization of every kind that is valid on the lattice.
pub fn all_kinds(lattice: &LatticeSpec) -> Vec<TransitionKind> {
    use TransitionKind::*;
    let n = lattice.sites();
    let m = lattice.levels();
    let mut kinds = Vec::new();
    if m == 2 {
        kinds.extend([LeftEntry, RightEntry, LeftExit, RightExit]);
        for site in 1..=n {
            kinds.push(Attach { site });
            kinds.push(Detach { site });
        }
        for width in 1..=n {
            kinds.push(FootprintEntry { width });
            kinds.push(FootprintExit { width });
            for head in width..n {
                kinds.push(FootprintHop { width, head });
            }
        }
    }
    for site in 1..n {
        kinds.push(HopRight { site });
        kinds.push(GenericHop { site });
    }
    for site in 2..=n {
        kinds.push(HopLeft { site });
    }
    for site in 1..=n {
        for length in [-(site as isize) + 1, 2, (n as isize) - (site as isize)] {
            let dst = site as isize + length;
            if length != 0 && dst >= 1 && dst <= n as isize && dst != site as isize {
                kinds.push(LongRangeHop { site, length });
            }
        }
    }
    if n >= 2 {
        kinds.push(PeriodicWrapHop);
    }
    if m >= 3 {
        for species in 1..m {
            kinds.push(SpeciesEntry { species });
            kinds.push(SpeciesExit { species });
            kinds.push(SpeciesAttach { species, site: 1 + species % n });
            kinds.push(SpeciesDetach { species, site: 1 + species % n });
        }
        if n >= 2 {
            for left in 1..m {
                for right in 1..m {
                    if left != right {
                        kinds.push(Switch { left, right, site: 1 + (left + right) % (n - 1).max(1) });
                    }
                }
            }
        }
    }
    kinds
}

/// All `(sites, levels)` pairs with `levels^sites ≤ cap` and `sites ≥ 2`,
/// plus single-site lattices up to `single_site_levels`.
pub fn exhaustive_grid(cap: usize, single_site_levels: usize) -> Vec<LatticeSpec> {
    let mut grid = Vec::new();
    for m in 2..=single_site_levels {
        grid.push(LatticeSpec::new(1, m).unwrap());
    }
    for m in 2..=cap {
        if m * m > cap {
            break;
        }
        let mut states = m * m;
        let mut n = 2;
        while states <= cap {
            grid.push(LatticeSpec::new(n, m).unwrap());
            n += 1;
            match states.checked_mul(m) {
                Some(next) => states = next,
                None => break,
            }
        }
    }
    grid
}

/// Fold of the per-site delta encodings `δ_m^(m − x_i)` via the semi-tensor
/// product.
pub fn encode_state(lattice: &LatticeSpec, digits: &[usize]) -> LogicalMatrix {
    let m = lattice.levels();
    let mut acc = LogicalMatrix::delta_column(m, m - digits[0]).unwrap();
    for &x in &digits[1..] {
        acc = stp_logical(&acc, &LogicalMatrix::delta_column(m, m - x).unwrap()).unwrap();
    }
    acc
}

/// A small family of functions exercising the structure-matrix identity.
pub fn eq1_test_functions(lattice: &LatticeSpec) -> Vec<MvFunction> {
    let m = lattice.levels();
    vec![
        MvFunction::identity(lattice, 1).unwrap(),
        MvFunction::from_fn(lattice, |x| x.iter().copied().max().unwrap_or(0)),
        MvFunction::from_fn(lattice, move |x| x.iter().sum::<usize>() % m),
    ]
}

/// Open-boundary single-species model with rightward hops.
pub fn tasep(n: usize, alpha: f64, beta: f64, p: f64) -> ModelSpec<f64> {
    let lattice = LatticeSpec::new(n, 2).unwrap();
    let mut transitions = vec![
        standard_transition(&TransitionKind::LeftEntry, &lattice, alpha).unwrap(),
        standard_transition(&TransitionKind::RightExit, &lattice, beta).unwrap(),
    ];
    for site in 1..n {
        transitions
            .push(standard_transition(&TransitionKind::HopRight { site }, &lattice, p).unwrap());
    }
    ModelSpec::new(lattice, transitions, Restriction::None).unwrap()
}

/// Blocks of `width` adjacent particles entering, hopping and leaving.
pub fn footprint_model(width: usize, n: usize, rates: (f64, f64, f64)) -> ModelSpec<f64> {
    let lattice = LatticeSpec::new(n, 2).unwrap();
    let (alpha, beta, p) = rates;
    let mut transitions = vec![
        standard_transition(&TransitionKind::FootprintEntry { width }, &lattice, alpha).unwrap(),
        standard_transition(&TransitionKind::FootprintExit { width }, &lattice, beta).unwrap(),
    ];
    for head in width..n {
        transitions.push(
            standard_transition(&TransitionKind::FootprintHop { width, head }, &lattice, p)
                .unwrap(),
        );
    }
    ModelSpec::new(lattice, transitions, Restriction::Footprint { width }).unwrap()
}

/// Per-species entry/exit at rate `scale · species` plus species-blind hops
/// (or the equivalent per-species bundle when `generic_hops` is false).
pub fn multi_species_model(n: usize, m: usize, scale: f64, generic_hops: bool) -> ModelSpec<f64> {
    let lattice = LatticeSpec::new(n, m).unwrap();
    let mut transitions = Vec::new();
    for species in 1..m {
        let rate = scale * species as f64;
        transitions.push(
            standard_transition(&TransitionKind::SpeciesEntry { species }, &lattice, rate)
                .unwrap(),
        );
        transitions.push(
            standard_transition(&TransitionKind::SpeciesExit { species }, &lattice, rate).unwrap(),
        );
    }
    for site in 1..n {
        if generic_hops {
            transitions.push(
                standard_transition(&TransitionKind::GenericHop { site }, &lattice, 1.0).unwrap(),
            );
        } else {
            for species in 1..m {
                transitions.push(species_hop(&lattice, species, site, 1.0));
            }
        }
    }
    ModelSpec::new(lattice, transitions, Restriction::None).unwrap()
}

/// Hop of one particular species, composed from the generic builders.
pub fn species_hop(
    lattice: &LatticeSpec,
    species: usize,
    site: usize,
    rate: f64,
) -> TransitionSpec<f64> {
    let conds = ConditionSet::new([(site, species), (site + 1, 0)]).unwrap();
    let mut fns: Vec<MvFunction> = (1..=lattice.sites())
        .map(|i| MvFunction::identity(lattice, i).unwrap())
        .collect();
    fns[site - 1] = build_mv_function(lattice, site, species, 0, conds.clone()).unwrap();
    fns[site] = build_mv_function(lattice, site + 1, 0, species, conds).unwrap();
    TransitionSpec::new(format!("species-hop({species},{site})"), rate, *lattice, fns).unwrap()
}

/// Every transition with a closed-form structure matrix, at every valid site.
pub fn table1_kinds(n: usize) -> Vec<TransitionKind> {
    use TransitionKind::*;
    let mut kinds = vec![LeftEntry, RightEntry, LeftExit, RightExit];
    for site in 1..=n {
        kinds.push(Attach { site });
        kinds.push(Detach { site });
    }
    for site in 1..n {
        kinds.push(HopRight { site });
    }
    for site in 2..=n {
        kinds.push(HopLeft { site });
    }
    kinds
}

/// The classical Boolean functions for single-species transitions, written
/// as plain closures over Boolean arithmetic.
pub fn classic_functions(lattice: &LatticeSpec, kind: &TransitionKind) -> Vec<MvFunction> {
    use TransitionKind::*;
    let n = lattice.sites();
    let mut fns: Vec<MvFunction> = (1..=n)
        .map(|i| MvFunction::identity(lattice, i).unwrap())
        .collect();
    let constant_one = |_: &[usize]| 1usize;
    let constant_zero = |_: &[usize]| 0usize;
    match *kind {
        LeftEntry => fns[0] = MvFunction::from_fn(lattice, constant_one),
        RightEntry => fns[n - 1] = MvFunction::from_fn(lattice, constant_one),
        Attach { site } => fns[site - 1] = MvFunction::from_fn(lattice, constant_one),
        LeftExit => fns[0] = MvFunction::from_fn(lattice, constant_zero),
        RightExit => fns[n - 1] = MvFunction::from_fn(lattice, constant_zero),
        Detach { site } => fns[site - 1] = MvFunction::from_fn(lattice, constant_zero),
        HopRight { site } => {
            let (j, k) = (site - 1, site); // 0-based source, target
            fns[j] = MvFunction::from_fn(lattice, move |x| x[j] & ((1 - x[j]) | x[k]));
            fns[k] = MvFunction::from_fn(lattice, move |x| x[k] | (x[j] & (1 - x[k])));
        }
        HopLeft { site } => {
            let (j, k) = (site - 1, site - 2);
            fns[j] = MvFunction::from_fn(lattice, move |x| x[j] & ((1 - x[j]) | x[k]));
            fns[k] = MvFunction::from_fn(lattice, move |x| x[k] | (x[j] & (1 - x[k])));
        }
        ref other => panic!("no classical functions for {other}"),
    }
    fns
}
