//! Structure matrices of logical functions and whole transitions.
//!
//! The structure matrix of an `N`-ary `m`-valued function `f` is the
//! `m × m^N` logical matrix whose column at delta index `j` is
//! `δ_m^(m − f(x))` for the configuration `x` with `dec(x) = m^N − j`. It is
//! built here column by column from the truth table — no symbolic
//! manipulation of operator matrices is needed. A transition's structure
//! matrix is the Khatri-Rao product of its per-site structure matrices.
//!
//! [`table1_matrix`] builds the closed-form block matrices available for
//! the classical single-species transitions and is used to cross-check the
//! general construction.

use crate::error::{Error, Result};
use crate::logic::{MvFunction, TransitionKind, TransitionSpec};
use crate::scalar::Scalar;
use crate::state::LatticeSpec;

use super::logical::LogicalMatrix;

/// Structure matrix of one site function: `m × m^N`, column `j` holding
/// `δ_m^(m − f(x_j))` where `x_j` is the configuration at delta index `j`.
pub fn structure_matrix(f: &MvFunction, lattice: &LatticeSpec) -> Result<LogicalMatrix> {
    if f.sites() != lattice.sites() || f.levels() != lattice.levels() {
        return Err(Error::DimensionMismatch(
            "function arity does not match the lattice".into(),
        ));
    }
    let m = lattice.levels();
    let mut col_index = vec![0usize; lattice.state_count()];
    let mut bad = None;
    lattice.for_each_state_delta_order(|pos, digits| {
        let v = f.eval(digits);
        if v >= m {
            bad.get_or_insert(v);
            return;
        }
        col_index[pos] = m - v;
    });
    if let Some(v) = bad {
        return Err(Error::InvalidState(format!(
            "evaluator returned {v}, outside {m} levels"
        )));
    }
    LogicalMatrix::new(m, col_index)
}

/// Structure matrix of a whole transition: the Khatri-Rao fold of the
/// per-site structure matrices, `m^N × m^N`. Column `j` maps delta index
/// `j` to the delta index of the successor configuration.
pub fn transition_structure_matrix<T: Scalar>(t: &TransitionSpec<T>) -> Result<LogicalMatrix> {
    let lattice = t.lattice();
    let mut acc: Option<LogicalMatrix> = None;
    for f in t.site_functions() {
        let mf = structure_matrix(f, lattice)?;
        acc = Some(match acc {
            None => mf,
            Some(prev) => prev.khatri_rao(&mf)?,
        });
    }
    acc.ok_or(Error::EmptyModel)
}

// Closed-form blocks for the single-species transitions. Each block acts on
// the trailing sites of the lattice and is prefixed with an identity via the
// Kronecker product.

/// Attach block: occupies site `i` regardless, identity elsewhere.
fn attach_block(n: usize, i: usize) -> LogicalMatrix {
    let half = 1usize << (n - i);
    let cols = (0..2 * half).map(|c| (c % half) + 1).collect();
    LogicalMatrix::new(2 * half, cols).expect("indices in range")
}

/// Detach block: clears site `i` regardless, identity elsewhere.
fn detach_block(n: usize, i: usize) -> LogicalMatrix {
    let half = 1usize << (n - i);
    let cols = (0..2 * half).map(|c| half + (c % half) + 1).collect();
    LogicalMatrix::new(2 * half, cols).expect("indices in range")
}

/// Block permutation on the pair `(i, i+1)`: `map[b]` is the 1-based target
/// block of source block `b`, identity inside each block.
fn pair_block(n: usize, i: usize, map: [usize; 4]) -> LogicalMatrix {
    let b = 1usize << (n - i - 1);
    let cols = (0..4 * b)
        .map(|c| (map[c / b] - 1) * b + (c % b) + 1)
        .collect();
    LogicalMatrix::new(4 * b, cols).expect("indices in range")
}

/// Closed-form structure matrix for a classical single-species transition
/// (two-level lattices only): an identity prefix Kronecker-multiplied with
/// the transition's block matrix. Supported kinds: attach, detach, the four
/// boundary transitions, and nearest-neighbor hops.
pub fn table1_matrix(kind: &TransitionKind, lattice: &LatticeSpec) -> Result<LogicalMatrix> {
    use TransitionKind::*;
    if lattice.levels() != 2 {
        return Err(Error::InvalidTransition(
            "closed-form structure matrices cover two-level lattices only".into(),
        ));
    }
    let n = lattice.sites();
    let site_range = |site: usize, lo: usize, hi: usize, what: &'static str| -> Result<usize> {
        if site < lo || site > hi {
            return Err(Error::IndexOutOfRange { what, index: site, limit: hi });
        }
        Ok(site)
    };
    let prefixed = |i: usize, block: LogicalMatrix| -> Result<LogicalMatrix> {
        LogicalMatrix::identity(1 << (i - 1)).kron(&block)
    };
    match *kind {
        Attach { site } => {
            let i = site_range(site, 1, n, "attach site")?;
            prefixed(i, attach_block(n, i))
        }
        Detach { site } => {
            let i = site_range(site, 1, n, "detach site")?;
            prefixed(i, detach_block(n, i))
        }
        LeftEntry => prefixed(1, attach_block(n, 1)),
        LeftExit => prefixed(1, detach_block(n, 1)),
        RightEntry => prefixed(n, LogicalMatrix::new(2, vec![1, 1])?),
        RightExit => prefixed(n, LogicalMatrix::new(2, vec![2, 2])?),
        HopRight { site } => {
            if n < 2 {
                return Err(Error::InvalidTransition("hopping needs two sites".into()));
            }
            let i = site_range(site, 1, n - 1, "hop source site")?;
            prefixed(i, pair_block(n, i, [1, 3, 3, 4]))
        }
        HopLeft { site } => {
            if n < 2 {
                return Err(Error::InvalidTransition("hopping needs two sites".into()));
            }
            // a hop i → i-1 acts on the pair (i-1, i)
            let i = site_range(site, 2, n, "hop source site")?;
            prefixed(i - 1, pair_block(n, i - 1, [1, 2, 2, 4]))
        }
        ref other => Err(Error::InvalidTransition(format!(
            "no closed-form structure matrix for `{other}`"
        ))),
    }
}
