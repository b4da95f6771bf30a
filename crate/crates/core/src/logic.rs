//! Per-site logical functions and the transitions they describe.
//!
//! A transition is a vector of `N` functions, one per site, each mapping the
//! whole configuration to that site's next level. Every function built here
//! has self-loop semantics: when the transition's enabling conditions fail,
//! the site keeps its current level, so the transition fixes the state.
//!
//! Boolean builders ([`build_set_function`], [`build_clear_function`]) take
//! two index sets: sites that must be empty and sites that must be occupied
//! for the change to fire. The multi-valued builder ([`build_mv_function`])
//! takes a [`ConditionSet`] of required `(site, level)` pairs and routes the
//! change through the [`sigma_gate`], with conjunction and disjunction read
//! as `min` and `max`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::state::{dec_of, LatticeSpec, State};

/// A set of `(site, level)` requirements, at most one per site. Sites are
/// 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionSet {
    pairs: Vec<(usize, usize)>,
}

impl ConditionSet {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateConditionSite { site: w[0].0 });
            }
        }
        Ok(Self { pairs })
    }

    pub fn empty() -> Self {
        Self { pairs: Vec::new() }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// The level this set requires at `site`, if any.
    pub fn required_level(&self, site: usize) -> Option<usize> {
        self.pairs
            .binary_search_by_key(&site, |p| p.0)
            .ok()
            .map(|i| self.pairs[i].1)
    }

    /// True when every `(site, level)` pair is met by `digits`. A site
    /// beyond the end of `digits` cannot meet its requirement.
    pub fn holds(&self, digits: &[usize]) -> bool {
        self.pairs
            .iter()
            .all(|&(site, level)| digits.get(site - 1) == Some(&level))
    }

    fn validate(&self, lattice: &LatticeSpec) -> Result<()> {
        for &(site, level) in &self.pairs {
            if site == 0 || site > lattice.sites() {
                return Err(Error::IndexOutOfRange {
                    what: "condition site",
                    index: site,
                    limit: lattice.sites(),
                });
            }
            if level >= lattice.levels() {
                return Err(Error::IndexOutOfRange {
                    what: "condition level",
                    index: level,
                    limit: lattice.levels(),
                });
            }
        }
        Ok(())
    }
}

/// `a` when every condition holds in `state`, `b` otherwise. An empty
/// condition set is vacuously true.
pub fn sigma_gate(a: usize, b: usize, conds: &ConditionSet, state: &State) -> usize {
    if conds.holds(state.digits()) {
        a
    } else {
        b
    }
}

type EvalFn = Arc<dyn Fn(&[usize]) -> usize + Send + Sync>;

#[derive(Clone)]
enum FnKind {
    /// `f(x) = x_site`.
    Identity { site0: usize },
    /// Boolean 0→1 change at `site0` gated on `zero0` empty and `one0` full.
    SetBool {
        site0: usize,
        zero0: Vec<usize>,
        one0: Vec<usize>,
    },
    /// Boolean 1→0 change, same gating.
    ClearBool {
        site0: usize,
        zero0: Vec<usize>,
        one0: Vec<usize>,
    },
    /// Multi-valued step `from → to` at `site0`, gated on `conds`.
    SigmaStep {
        site0: usize,
        from: usize,
        to: usize,
        conds: ConditionSet,
    },
    /// Source site of a species-preserving move: empties iff the move fires.
    MoveSource { src0: usize, dst0: usize },
    /// Destination site of a species-preserving move: receives the source
    /// level iff the move fires.
    MoveTarget { src0: usize, dst0: usize },
    /// Materialized truth table in delta order.
    Table { values: Arc<Vec<usize>> },
    Custom { eval: EvalFn },
}

/// An `N`-ary `m`-valued logical function: one site's next level as a
/// function of the whole configuration.
#[derive(Clone)]
pub struct MvFunction {
    sites: usize,
    levels: usize,
    kind: FnKind,
}

impl fmt::Debug for MvFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            FnKind::Identity { site0 } => format!("identity(site {})", site0 + 1),
            FnKind::SetBool { site0, .. } => format!("set(site {})", site0 + 1),
            FnKind::ClearBool { site0, .. } => format!("clear(site {})", site0 + 1),
            FnKind::SigmaStep { site0, from, to, .. } => {
                format!("sigma(site {}, {from}->{to})", site0 + 1)
            }
            FnKind::MoveSource { src0, dst0 } => format!("move-src({}->{})", src0 + 1, dst0 + 1),
            FnKind::MoveTarget { src0, dst0 } => format!("move-dst({}->{})", src0 + 1, dst0 + 1),
            FnKind::Table { .. } => "table".to_string(),
            FnKind::Custom { .. } => "custom".to_string(),
        };
        write!(f, "MvFunction[{}^{} {kind}]", self.levels, self.sites)
    }
}

impl MvFunction {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, FnKind::Identity { .. })
    }

    /// `f(x) = x_site`; the function of every uninvolved site.
    pub fn identity(lattice: &LatticeSpec, site: usize) -> Result<Self> {
        check_site(lattice, site)?;
        Ok(Self {
            sites: lattice.sites(),
            levels: lattice.levels(),
            kind: FnKind::Identity { site0: site - 1 },
        })
    }

    /// Wraps an arbitrary evaluator. The evaluator must return levels below
    /// `lattice.levels()`; [`truth_table`](Self::truth_table) re-checks this.
    pub fn from_fn<F>(lattice: &LatticeSpec, eval: F) -> Self
    where
        F: Fn(&[usize]) -> usize + Send + Sync + 'static,
    {
        Self {
            sites: lattice.sites(),
            levels: lattice.levels(),
            kind: FnKind::Custom { eval: Arc::new(eval) },
        }
    }

    /// Builds a function from its truth table in delta order: entry `j`
    /// (0-based) is the value on the configuration with delta index `j + 1`.
    pub fn from_table(lattice: &LatticeSpec, values: Vec<usize>) -> Result<Self> {
        if values.len() != lattice.state_count() {
            return Err(Error::DimensionMismatch(format!(
                "truth table has {} entries, state space has {}",
                values.len(),
                lattice.state_count()
            )));
        }
        if let Some(&bad) = values.iter().find(|&&v| v >= lattice.levels()) {
            return Err(Error::InvalidState(format!(
                "truth table value {bad} out of range for {} levels",
                lattice.levels()
            )));
        }
        Ok(Self {
            sites: lattice.sites(),
            levels: lattice.levels(),
            kind: FnKind::Table { values: Arc::new(values) },
        })
    }

    /// Evaluates the function on a digit slice of length `sites`.
    pub fn eval(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.sites);
        match &self.kind {
            FnKind::Identity { site0 } => digits[*site0],
            FnKind::SetBool { site0, zero0, one0 } => {
                if bool_conditions_hold(digits, zero0, one0) {
                    1
                } else {
                    digits[*site0]
                }
            }
            FnKind::ClearBool { site0, zero0, one0 } => {
                if bool_conditions_hold(digits, zero0, one0) {
                    0
                } else {
                    digits[*site0]
                }
            }
            FnKind::SigmaStep { site0, from, to, conds } => {
                let x = digits[*site0];
                if from > to {
                    // x ∧ σ_{to, m-1}
                    let gate = if conds.holds(digits) { *to } else { self.levels - 1 };
                    x.min(gate)
                } else {
                    // x ∨ σ_{to, 0}
                    let gate = if conds.holds(digits) { *to } else { 0 };
                    x.max(gate)
                }
            }
            FnKind::MoveSource { src0, dst0 } => {
                if digits[*src0] != 0 && digits[*dst0] == 0 {
                    0
                } else {
                    digits[*src0]
                }
            }
            FnKind::MoveTarget { src0, dst0 } => {
                if digits[*src0] != 0 && digits[*dst0] == 0 {
                    digits[*src0]
                } else {
                    digits[*dst0]
                }
            }
            FnKind::Table { values } => values[values.len() - 1 - dec_of(digits, self.levels)],
            FnKind::Custom { eval } => {
                let v = eval(digits);
                debug_assert!(v < self.levels, "custom evaluator returned {v}");
                v
            }
        }
    }

    /// Materializes the truth table in delta order, checking every value.
    pub fn truth_table(&self, lattice: &LatticeSpec) -> Result<Vec<usize>> {
        if lattice.sites() != self.sites || lattice.levels() != self.levels {
            return Err(Error::DimensionMismatch(
                "function arity does not match the lattice".into(),
            ));
        }
        let mut values = vec![0usize; lattice.state_count()];
        let mut bad = None;
        lattice.for_each_state_delta_order(|pos, digits| {
            let v = match &self.kind {
                FnKind::Custom { eval } => eval(digits),
                _ => self.eval(digits),
            };
            if v >= self.levels && bad.is_none() {
                bad = Some(v);
            }
            values[pos] = v;
        });
        if let Some(v) = bad {
            return Err(Error::InvalidState(format!(
                "evaluator returned {v}, outside {} levels",
                self.levels
            )));
        }
        Ok(values)
    }
}

fn bool_conditions_hold(digits: &[usize], zero0: &[usize], one0: &[usize]) -> bool {
    zero0.iter().all(|&i| digits[i] == 0) && one0.iter().all(|&i| digits[i] == 1)
}

fn check_site(lattice: &LatticeSpec, site: usize) -> Result<()> {
    if site == 0 || site > lattice.sites() {
        return Err(Error::IndexOutOfRange {
            what: "site",
            index: site,
            limit: lattice.sites(),
        });
    }
    Ok(())
}

fn check_bool_sets(
    lattice: &LatticeSpec,
    zero_sites: &[usize],
    one_sites: &[usize],
) -> Result<()> {
    for &s in zero_sites.iter().chain(one_sites) {
        check_site(lattice, s)?;
    }
    if zero_sites.iter().any(|s| one_sites.contains(s)) {
        return Err(Error::BuilderPrecondition(
            "a site cannot be required both empty and occupied".into(),
        ));
    }
    Ok(())
}

/// Boolean function for site `j` changing 0 → 1 when every site in
/// `zero_sites` is empty and every site in `one_sites` is occupied:
/// `f(x) = x_j ∨ [¬(∨ zero) ∧ (∧ one)]`. `j` must be in `zero_sites`.
pub fn build_set_function(
    lattice: &LatticeSpec,
    j: usize,
    zero_sites: &[usize],
    one_sites: &[usize],
) -> Result<MvFunction> {
    if lattice.levels() != 2 {
        return Err(Error::BuilderPrecondition(
            "Boolean builders need a two-level lattice".into(),
        ));
    }
    check_site(lattice, j)?;
    check_bool_sets(lattice, zero_sites, one_sites)?;
    if !zero_sites.contains(&j) {
        return Err(Error::BuilderPrecondition(format!(
            "site {j} must be among the required-empty sites for a 0→1 change"
        )));
    }
    Ok(MvFunction {
        sites: lattice.sites(),
        levels: 2,
        kind: FnKind::SetBool {
            site0: j - 1,
            zero0: zero_sites.iter().map(|s| s - 1).collect(),
            one0: one_sites.iter().map(|s| s - 1).collect(),
        },
    })
}

/// Boolean function for site `j` changing 1 → 0 under the same gating:
/// `f(x) = x_j ∧ [(∨ zero) ∨ ¬(∧ one)]`. `j` must be in `one_sites`.
pub fn build_clear_function(
    lattice: &LatticeSpec,
    j: usize,
    zero_sites: &[usize],
    one_sites: &[usize],
) -> Result<MvFunction> {
    if lattice.levels() != 2 {
        return Err(Error::BuilderPrecondition(
            "Boolean builders need a two-level lattice".into(),
        ));
    }
    check_site(lattice, j)?;
    check_bool_sets(lattice, zero_sites, one_sites)?;
    if !one_sites.contains(&j) {
        return Err(Error::BuilderPrecondition(format!(
            "site {j} must be among the required-occupied sites for a 1→0 change"
        )));
    }
    Ok(MvFunction {
        sites: lattice.sites(),
        levels: 2,
        kind: FnKind::ClearBool {
            site0: j - 1,
            zero0: zero_sites.iter().map(|s| s - 1).collect(),
            one0: one_sites.iter().map(|s| s - 1).collect(),
        },
    })
}

/// Multi-valued function for site `j` changing `a → b` when `conds` holds:
/// `x_j ∧ σ_{b,m-1}(conds)` for a decrease, `x_j ∨ σ_{b,0}(conds)` for an
/// increase. `(j, a)` must be among the conditions.
pub fn build_mv_function(
    lattice: &LatticeSpec,
    j: usize,
    a: usize,
    b: usize,
    conds: ConditionSet,
) -> Result<MvFunction> {
    check_site(lattice, j)?;
    conds.validate(lattice)?;
    if a >= lattice.levels() || b >= lattice.levels() {
        return Err(Error::IndexOutOfRange {
            what: "level",
            index: a.max(b),
            limit: lattice.levels(),
        });
    }
    if a == b {
        return Err(Error::BuilderPrecondition(
            "the change must alter the site's level (a = b)".into(),
        ));
    }
    if conds.required_level(j) != Some(a) {
        return Err(Error::BuilderPrecondition(format!(
            "conditions must require level {a} at the changing site {j}"
        )));
    }
    Ok(MvFunction {
        sites: lattice.sites(),
        levels: lattice.levels(),
        kind: FnKind::SigmaStep { site0: j - 1, from: a, to: b, conds },
    })
}

/// One transition: a label, a nonnegative rate and one function per site.
#[derive(Debug, Clone)]
pub struct TransitionSpec<T> {
    name: String,
    rate: T,
    lattice: LatticeSpec,
    site_functions: Vec<MvFunction>,
}

impl<T: Scalar> TransitionSpec<T> {
    pub fn new(
        name: impl Into<String>,
        rate: T,
        lattice: LatticeSpec,
        site_functions: Vec<MvFunction>,
    ) -> Result<Self> {
        let name = name.into();
        if !rate.is_finite() {
            return Err(Error::InvalidTransition(format!(
                "rate of `{name}` must be finite"
            )));
        }
        if rate < T::zero() {
            return Err(Error::NegativeRate {
                name,
                rate: rate.to_f64().unwrap_or(f64::NAN),
            });
        }
        if site_functions.len() != lattice.sites() {
            return Err(Error::InvalidTransition(format!(
                "`{name}` has {} site functions for {} sites",
                site_functions.len(),
                lattice.sites()
            )));
        }
        for f in &site_functions {
            if f.sites() != lattice.sites() || f.levels() != lattice.levels() {
                return Err(Error::InvalidTransition(format!(
                    "`{name}` mixes functions of different arity"
                )));
            }
        }
        Ok(Self { name, rate, lattice, site_functions })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rate(&self) -> T {
        self.rate
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn site_functions(&self) -> &[MvFunction] {
        &self.site_functions
    }

    /// Applies all site functions jointly, producing the successor digits.
    pub fn apply_digits(&self, digits: &[usize], out: &mut Vec<usize>) {
        out.clear();
        out.extend(self.site_functions.iter().map(|f| f.eval(digits)));
    }

    /// Successor configuration under this transition (self-loop when the
    /// transition is disabled in `s`).
    pub fn apply(&self, s: &State) -> State {
        let mut out = Vec::with_capacity(self.lattice.sites());
        self.apply_digits(s.digits(), &mut out);
        State::from_digits_unchecked(out)
    }

    /// True when the transition actually changes `digits`.
    pub fn changes(&self, digits: &[usize]) -> bool {
        self.site_functions
            .iter()
            .enumerate()
            .any(|(i, f)| f.eval(digits) != digits[i])
    }
}

/// The named transitions of exclusion-process models.
///
/// Sites, species, widths and heads are 1-based and validated against the
/// lattice by [`standard_transition`]. Boolean kinds (entries, exits,
/// attach/detach, footprint) need a two-level lattice; species kinds need
/// at least three levels; hop kinds work at any arity and move whatever
/// species occupies the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransitionKind {
    /// Particle enters at site 1 when empty.
    LeftEntry,
    /// Particle enters at site `N` when empty.
    RightEntry,
    /// Particle at site 1 leaves the lattice.
    LeftExit,
    /// Particle at site `N` leaves the lattice.
    RightExit,
    /// Particle attaches at a bulk site when empty.
    Attach { site: usize },
    /// Particle detaches from a bulk site.
    Detach { site: usize },
    /// Hop `site → site+1` when the target is empty.
    HopRight { site: usize },
    /// Hop `site → site-1` when the target is empty.
    HopLeft { site: usize },
    /// Hop `site → site+length` when the target is empty; `length` may be
    /// negative.
    LongRangeHop { site: usize, length: isize },
    /// Hop from site `N` back to site 1 when site 1 is empty.
    PeriodicWrapHop,
    /// Species `species` enters at site 1 when empty.
    SpeciesEntry { species: usize },
    /// Species `species` at site `N` leaves the lattice.
    SpeciesExit { species: usize },
    /// Species `species` attaches at `site` when empty.
    SpeciesAttach { species: usize, site: usize },
    /// Species `species` detaches from `site`.
    SpeciesDetach { species: usize, site: usize },
    /// Adjacent particles of species `left` (at `site`) and `right` (at
    /// `site+1`) swap places.
    Switch { left: usize, right: usize, site: usize },
    /// Any species hops `site → site+1` when the target is empty.
    GenericHop { site: usize },
    /// A particle spanning `width` sites enters when sites `1..=width` are
    /// all empty.
    FootprintEntry { width: usize },
    /// A particle spanning `width` sites leaves once its head reaches site
    /// `N` (the whole block clears).
    FootprintExit { width: usize },
    /// A particle spanning `width` sites with head at `head` advances one
    /// site to the right.
    FootprintHop { width: usize, head: usize },
}

impl fmt::Display for TransitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TransitionKind::*;
        match self {
            LeftEntry => write!(f, "left-entry"),
            RightEntry => write!(f, "right-entry"),
            LeftExit => write!(f, "left-exit"),
            RightExit => write!(f, "right-exit"),
            Attach { site } => write!(f, "attach({site})"),
            Detach { site } => write!(f, "detach({site})"),
            HopRight { site } => write!(f, "hop-right({site})"),
            HopLeft { site } => write!(f, "hop-left({site})"),
            LongRangeHop { site, length } => write!(f, "long-range-hop({site},{length})"),
            PeriodicWrapHop => write!(f, "periodic-wrap-hop"),
            SpeciesEntry { species } => write!(f, "species-entry({species})"),
            SpeciesExit { species } => write!(f, "species-exit({species})"),
            SpeciesAttach { species, site } => write!(f, "species-attach({species},{site})"),
            SpeciesDetach { species, site } => write!(f, "species-detach({species},{site})"),
            Switch { left, right, site } => write!(f, "switch({left},{right},{site})"),
            GenericHop { site } => write!(f, "generic-hop({site})"),
            FootprintEntry { width } => write!(f, "footprint-entry({width})"),
            FootprintExit { width } => write!(f, "footprint-exit({width})"),
            FootprintHop { width, head } => write!(f, "footprint-hop({width},{head})"),
        }
    }
}

fn require_boolean(lattice: &LatticeSpec, kind: &TransitionKind) -> Result<()> {
    if lattice.levels() != 2 {
        return Err(Error::InvalidTransition(format!(
            "`{kind}` needs a two-level lattice; use the species-* kinds for multi-species models"
        )));
    }
    Ok(())
}

fn require_species(lattice: &LatticeSpec, kind: &TransitionKind, species: usize) -> Result<()> {
    if lattice.levels() < 3 {
        return Err(Error::InvalidTransition(format!(
            "`{kind}` needs at least three levels (two-level lattices have a single species)"
        )));
    }
    if species == 0 || species >= lattice.levels() {
        return Err(Error::IndexOutOfRange {
            what: "species",
            index: species,
            limit: lattice.levels() - 1,
        });
    }
    Ok(())
}

fn move_pair(lattice: &LatticeSpec, src: usize, dst: usize) -> Result<Vec<MvFunction>> {
    check_site(lattice, src)?;
    check_site(lattice, dst)?;
    let mut fns = identity_row(lattice);
    if lattice.levels() == 2 {
        // the Boolean builders express a single-species hop exactly
        fns[src - 1] = build_clear_function(lattice, src, &[dst], &[src])?;
        fns[dst - 1] = build_set_function(lattice, dst, &[dst], &[src])?;
    } else {
        fns[src - 1] = MvFunction {
            sites: lattice.sites(),
            levels: lattice.levels(),
            kind: FnKind::MoveSource { src0: src - 1, dst0: dst - 1 },
        };
        fns[dst - 1] = MvFunction {
            sites: lattice.sites(),
            levels: lattice.levels(),
            kind: FnKind::MoveTarget { src0: src - 1, dst0: dst - 1 },
        };
    }
    Ok(fns)
}

fn identity_row(lattice: &LatticeSpec) -> Vec<MvFunction> {
    (1..=lattice.sites())
        .map(|i| MvFunction::identity(lattice, i).expect("site within bounds"))
        .collect()
}

/// Builds the [`TransitionSpec`] for a named transition kind.
pub fn standard_transition<T: Scalar>(
    kind: &TransitionKind,
    lattice: &LatticeSpec,
    rate: T,
) -> Result<TransitionSpec<T>> {
    use TransitionKind::*;
    let n = lattice.sites();
    let mut fns = identity_row(lattice);
    match *kind {
        LeftEntry => {
            require_boolean(lattice, kind)?;
            fns[0] = build_set_function(lattice, 1, &[1], &[])?;
        }
        RightEntry => {
            require_boolean(lattice, kind)?;
            fns[n - 1] = build_set_function(lattice, n, &[n], &[])?;
        }
        LeftExit => {
            require_boolean(lattice, kind)?;
            fns[0] = build_clear_function(lattice, 1, &[], &[1])?;
        }
        RightExit => {
            require_boolean(lattice, kind)?;
            fns[n - 1] = build_clear_function(lattice, n, &[], &[n])?;
        }
        Attach { site } => {
            require_boolean(lattice, kind)?;
            check_site(lattice, site)?;
            fns[site - 1] = build_set_function(lattice, site, &[site], &[])?;
        }
        Detach { site } => {
            require_boolean(lattice, kind)?;
            check_site(lattice, site)?;
            fns[site - 1] = build_clear_function(lattice, site, &[], &[site])?;
        }
        HopRight { site } | GenericHop { site } => {
            if site >= n {
                return Err(Error::IndexOutOfRange {
                    what: "hop source site",
                    index: site,
                    limit: n - 1,
                });
            }
            fns = move_pair(lattice, site, site + 1)?;
        }
        HopLeft { site } => {
            if site < 2 {
                return Err(Error::IndexOutOfRange { what: "hop source site", index: site, limit: n });
            }
            fns = move_pair(lattice, site, site - 1)?;
        }
        LongRangeHop { site, length } => {
            if length == 0 {
                return Err(Error::InvalidTransition("jump length must be nonzero".into()));
            }
            let dst = site as isize + length;
            if dst < 1 || dst > n as isize {
                return Err(Error::IndexOutOfRange {
                    what: "hop target site",
                    index: dst.max(0) as usize,
                    limit: n,
                });
            }
            fns = move_pair(lattice, site, dst as usize)?;
        }
        PeriodicWrapHop => {
            if n < 2 {
                return Err(Error::InvalidTransition(
                    "periodic wrap needs at least two sites".into(),
                ));
            }
            fns = move_pair(lattice, n, 1)?;
        }
        SpeciesEntry { species } => {
            require_species(lattice, kind, species)?;
            let conds = ConditionSet::new([(1, 0)])?;
            fns[0] = build_mv_function(lattice, 1, 0, species, conds)?;
        }
        SpeciesExit { species } => {
            require_species(lattice, kind, species)?;
            let conds = ConditionSet::new([(n, species)])?;
            fns[n - 1] = build_mv_function(lattice, n, species, 0, conds)?;
        }
        SpeciesAttach { species, site } => {
            require_species(lattice, kind, species)?;
            check_site(lattice, site)?;
            let conds = ConditionSet::new([(site, 0)])?;
            fns[site - 1] = build_mv_function(lattice, site, 0, species, conds)?;
        }
        SpeciesDetach { species, site } => {
            require_species(lattice, kind, species)?;
            check_site(lattice, site)?;
            let conds = ConditionSet::new([(site, species)])?;
            fns[site - 1] = build_mv_function(lattice, site, species, 0, conds)?;
        }
        Switch { left, right, site } => {
            require_species(lattice, kind, left)?;
            require_species(lattice, kind, right)?;
            if left == right {
                return Err(Error::InvalidTransition(
                    "switching equal species is a no-op".into(),
                ));
            }
            if site >= n {
                return Err(Error::IndexOutOfRange {
                    what: "switch site",
                    index: site,
                    limit: n - 1,
                });
            }
            let conds = ConditionSet::new([(site, left), (site + 1, right)])?;
            fns[site - 1] = build_mv_function(lattice, site, left, right, conds.clone())?;
            fns[site] = build_mv_function(lattice, site + 1, right, left, conds)?;
        }
        FootprintEntry { width } => {
            require_boolean(lattice, kind)?;
            check_footprint(lattice, width)?;
            let block: Vec<usize> = (1..=width).collect();
            for j in 1..=width {
                fns[j - 1] = build_set_function(lattice, j, &block, &[])?;
            }
        }
        FootprintExit { width } => {
            require_boolean(lattice, kind)?;
            check_footprint(lattice, width)?;
            let block: Vec<usize> = (n - width + 1..=n).collect();
            for &j in &block {
                fns[j - 1] = build_clear_function(lattice, j, &[], &block)?;
            }
        }
        FootprintHop { width, head } => {
            require_boolean(lattice, kind)?;
            check_footprint(lattice, width)?;
            if head < width || head >= n {
                return Err(Error::IndexOutOfRange {
                    what: "footprint head site",
                    index: head,
                    limit: n - 1,
                });
            }
            let tail = head - width + 1;
            let block: Vec<usize> = (tail..=head).collect();
            fns[tail - 1] = build_clear_function(lattice, tail, &[head + 1], &block)?;
            fns[head] = build_set_function(lattice, head + 1, &[head + 1], &block)?;
        }
    }
    TransitionSpec::new(kind.to_string(), rate, *lattice, fns)
}

fn check_footprint(lattice: &LatticeSpec, width: usize) -> Result<()> {
    if width == 0 || width > lattice.sites() {
        return Err(Error::IndexOutOfRange {
            what: "footprint width",
            index: width,
            limit: lattice.sites(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(n: usize, m: usize) -> LatticeSpec {
        LatticeSpec::new(n, m).unwrap()
    }

    fn apply_kind(kind: &TransitionKind, lattice: &LatticeSpec, digits: Vec<usize>) -> Vec<usize> {
        let t = standard_transition::<f64>(kind, lattice, 1.0).unwrap();
        let s = lattice.state(digits).unwrap();
        t.apply(&s).into_digits()
    }

    #[test]
    fn sigma_gate_returns_a_on_satisfied_conditions() {
        let l = lat(2, 3);
        let conds = ConditionSet::new([(1, 0)]).unwrap();
        let s = l.state(vec![0, 1]).unwrap();
        assert_eq!(sigma_gate(2, 0, &conds, &s), 2);

        let s2 = l.state(vec![1, 1]).unwrap();
        assert_eq!(sigma_gate(2, 0, &conds, &s2), 0);

        // vacuous conjunction
        let s3 = l.state(vec![2, 2]).unwrap();
        assert_eq!(sigma_gate(0, 2, &ConditionSet::empty(), &s3), 0);
    }

    #[test]
    fn condition_set_rejects_duplicate_sites() {
        assert!(matches!(
            ConditionSet::new([(1, 0), (1, 2)]),
            Err(Error::DuplicateConditionSite { site: 1 })
        ));
    }

    #[test]
    fn set_function_entry_semantics() {
        let l = lat(2, 2);
        let f = build_set_function(&l, 1, &[1], &[]).unwrap();
        assert_eq!(f.eval(&[0, 1]), 1); // empty site fills
        assert_eq!(f.eval(&[1, 0]), 1); // occupied site keeps its particle
    }

    #[test]
    fn set_function_blocked_hop_target() {
        let l = lat(2, 2);
        let f = build_set_function(&l, 2, &[2], &[1]).unwrap();
        assert_eq!(f.eval(&[0, 0]), 0); // no particle to hop
        assert_eq!(f.eval(&[1, 0]), 1);
        assert_eq!(f.eval(&[1, 1]), 1);
    }

    #[test]
    fn clear_function_exit_and_hop_source() {
        let l = lat(2, 2);
        let exit = build_clear_function(&l, 2, &[], &[2]).unwrap();
        assert_eq!(exit.eval(&[0, 1]), 0);
        assert_eq!(exit.eval(&[1, 1]), 0);

        let src = build_clear_function(&l, 1, &[2], &[1]).unwrap();
        assert_eq!(src.eval(&[1, 1]), 1); // blocked by occupied target
        assert_eq!(src.eval(&[1, 0]), 0); // hop proceeds
    }

    #[test]
    fn builder_preconditions() {
        let l = lat(3, 2);
        // changing site absent from the required-empty set
        assert!(build_set_function(&l, 1, &[2], &[3]).is_err());
        // overlapping requirement sets
        assert!(build_set_function(&l, 1, &[1, 2], &[2]).is_err());
        // changing site absent from the required-occupied set
        assert!(build_clear_function(&l, 1, &[2], &[3]).is_err());

        let l3 = lat(2, 3);
        // (j, a) missing from the conditions
        assert!(build_mv_function(&l3, 1, 0, 2, ConditionSet::new([(2, 0)]).unwrap()).is_err());
        // a = b
        assert!(build_mv_function(&l3, 1, 1, 1, ConditionSet::new([(1, 1)]).unwrap()).is_err());
    }

    #[test]
    fn mv_function_attach_and_detach() {
        let l = lat(2, 3);
        let attach = build_mv_function(&l, 1, 0, 2, ConditionSet::new([(1, 0)]).unwrap()).unwrap();
        assert_eq!(attach.eval(&[0, 1]), 2);
        assert_eq!(attach.eval(&[1, 1]), 1);

        let detach = build_mv_function(&l, 1, 2, 0, ConditionSet::new([(1, 2)]).unwrap()).unwrap();
        assert_eq!(detach.eval(&[1, 1]), 1); // condition violated, unchanged
        assert_eq!(detach.eval(&[2, 1]), 0);
    }

    #[test]
    fn switch_swaps_adjacent_species() {
        let l = lat(2, 3);
        let out = apply_kind(&TransitionKind::Switch { left: 1, right: 2, site: 1 }, &l, vec![1, 2]);
        assert_eq!(out, vec![2, 1]);
        // disabled when the pair does not match
        let unchanged =
            apply_kind(&TransitionKind::Switch { left: 1, right: 2, site: 1 }, &l, vec![2, 1]);
        assert_eq!(unchanged, vec![2, 1]);
    }

    #[test]
    fn hop_right_moves_particle() {
        let l = lat(2, 2);
        assert_eq!(apply_kind(&TransitionKind::HopRight { site: 1 }, &l, vec![1, 0]), vec![0, 1]);
        assert_eq!(apply_kind(&TransitionKind::HopRight { site: 1 }, &l, vec![1, 1]), vec![1, 1]);
    }

    #[test]
    fn generic_hop_carries_the_species() {
        let l = lat(2, 6);
        assert_eq!(apply_kind(&TransitionKind::GenericHop { site: 1 }, &l, vec![3, 0]), vec![0, 3]);
        assert_eq!(apply_kind(&TransitionKind::GenericHop { site: 1 }, &l, vec![3, 2]), vec![3, 2]);
    }

    #[test]
    fn footprint_entry_needs_the_whole_block_empty() {
        let l = lat(5, 2);
        let kind = TransitionKind::FootprintEntry { width: 2 };
        assert_eq!(apply_kind(&kind, &l, vec![0, 0, 0, 0, 0]), vec![1, 1, 0, 0, 0]);
        assert_eq!(apply_kind(&kind, &l, vec![0, 1, 0, 0, 0]), vec![0, 1, 0, 0, 0]);
    }

    #[test]
    fn footprint_hop_advances_the_block() {
        let l = lat(5, 2);
        let kind = TransitionKind::FootprintHop { width: 2, head: 2 };
        assert_eq!(apply_kind(&kind, &l, vec![1, 1, 0, 0, 0]), vec![0, 1, 1, 0, 0]);
        assert_eq!(apply_kind(&kind, &l, vec![1, 1, 1, 0, 0]), vec![1, 1, 1, 0, 0]);
    }

    #[test]
    fn footprint_exit_clears_the_trailing_block() {
        let l = lat(5, 2);
        let kind = TransitionKind::FootprintExit { width: 2 };
        assert_eq!(apply_kind(&kind, &l, vec![0, 1, 1, 1, 1]), vec![0, 1, 1, 0, 0]);
        assert_eq!(apply_kind(&kind, &l, vec![1, 1, 0, 1, 0]), vec![1, 1, 0, 1, 0]);
    }

    #[test]
    fn kind_validation_errors() {
        let l2 = lat(3, 2);
        let l3 = lat(3, 3);
        assert!(standard_transition::<f64>(&TransitionKind::SpeciesEntry { species: 1 }, &l2, 1.0).is_err());
        assert!(standard_transition::<f64>(&TransitionKind::LeftEntry, &l3, 1.0).is_err());
        assert!(standard_transition::<f64>(&TransitionKind::HopRight { site: 3 }, &l2, 1.0).is_err());
        assert!(standard_transition::<f64>(&TransitionKind::HopLeft { site: 1 }, &l2, 1.0).is_err());
        assert!(standard_transition::<f64>(&TransitionKind::SpeciesEntry { species: 3 }, &l3, 1.0).is_err());
        assert!(standard_transition::<f64>(&TransitionKind::FootprintEntry { width: 4 }, &l2, 1.0).is_err());
        assert!(standard_transition::<f64>(&TransitionKind::FootprintHop { width: 2, head: 1 }, &l2, 1.0).is_err());
        assert!(standard_transition::<f64>(&TransitionKind::LongRangeHop { site: 2, length: 3 }, &l2, 1.0).is_err());
        assert!(standard_transition::<f64>(&TransitionKind::Switch { left: 1, right: 1, site: 1 }, &l3, 1.0).is_err());
    }

    #[test]
    fn negative_rate_rejected() {
        let l = lat(2, 2);
        assert!(matches!(
            standard_transition::<f64>(&TransitionKind::LeftEntry, &l, -0.5),
            Err(Error::NegativeRate { .. })
        ));
    }

    #[test]
    fn truth_table_matches_evaluator() {
        let l = lat(2, 3);
        let f = build_mv_function(&l, 1, 0, 2, ConditionSet::new([(1, 0)]).unwrap()).unwrap();
        let table = f.truth_table(&l).unwrap();
        l.for_each_state_delta_order(|pos, digits| {
            assert_eq!(table[pos], f.eval(digits));
        });
        let rebuilt = MvFunction::from_table(&l, table).unwrap();
        l.for_each_state_delta_order(|_, digits| {
            assert_eq!(rebuilt.eval(digits), f.eval(digits));
        });
    }

    #[test]
    fn custom_evaluator_out_of_range_is_caught() {
        let l = lat(2, 2);
        let f = MvFunction::from_fn(&l, |_| 7);
        assert!(matches!(f.truth_table(&l), Err(Error::InvalidState(_))));
    }
}
