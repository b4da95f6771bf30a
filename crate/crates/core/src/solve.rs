//! Stationary-distribution solvers.
//!
//! The power method iterates `π ← Mπ` from a uniform start, renormalizing
//! each step, until the step difference drops below `tol` in the 1-norm.
//! The direct method solves `(M − I)π = 0, Σπ = 1` by dense Gaussian
//! elimination and is capped at small dimensions. Reducible chains have
//! several stationary vectors; both methods still return a valid one, and
//! [`solve_steady_state`] flags the result as non-unique when the two
//! methods disagree or the direct system is rank-deficient.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stochastic::{Distribution, StochasticMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Power,
    Direct,
}

#[derive(Debug, Clone)]
pub struct SolveOptions<T> {
    /// Stop when the 1-norm step difference falls below this.
    pub tol: T,
    pub max_iter: usize,
    /// Largest dimension the direct method accepts.
    pub direct_cap: usize,
    /// Largest dimension at which [`solve_steady_state`] cross-runs the
    /// other method as a uniqueness probe (the probe is dense, so this
    /// stays well below `direct_cap`).
    pub probe_cap: usize,
    /// Power-method start; uniform when absent.
    pub start: Option<Vec<T>>,
}

impl<T: Scalar> Default for SolveOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::from_f64(1e-10).unwrap_or_else(T::epsilon),
            max_iter: 1_000_000,
            direct_cap: 4096,
            probe_cap: 512,
            start: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    pub distribution: Distribution<T>,
    /// The method that was requested (a rank-deficient direct solve falls
    /// back to power iteration internally).
    pub method: Method,
    pub iterations: usize,
    /// `‖Mπ − π‖₁` of the returned vector.
    pub residual: T,
    /// Set when the chain demonstrably has several stationary vectors.
    pub non_unique: bool,
}

/// Runs one solver method.
pub fn steady_state<T: Scalar>(
    m: &StochasticMatrix<T>,
    method: Method,
    opts: &SolveOptions<T>,
) -> Result<SolveReport<T>> {
    match method {
        Method::Power => power_method(m, opts),
        Method::Direct => direct_method(m, opts),
    }
}

/// Runs the requested method and, when the dimension permits, the other one
/// as a uniqueness probe: disagreement beyond `10 · tol` (or a
/// rank-deficient direct solve) marks the chain non-unique.
pub fn solve_steady_state<T: Scalar>(
    m: &StochasticMatrix<T>,
    method: Method,
    opts: &SolveOptions<T>,
) -> Result<SolveReport<T>> {
    let mut report = steady_state(m, method, opts)?;
    if m.dim() <= opts.probe_cap.min(opts.direct_cap) {
        let other = match method {
            Method::Power => Method::Direct,
            Method::Direct => Method::Power,
        };
        if let Ok(probe) = steady_state(m, other, opts) {
            let ten = T::from_u32(10).unwrap();
            if probe.non_unique
                || report
                    .distribution
                    .l1_distance(&probe.distribution)
                    .map(|d| d > ten * opts.tol)
                    .unwrap_or(false)
            {
                report.non_unique = true;
            }
        }
    }
    Ok(report)
}

fn l1_diff<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).sum()
}

fn residual_of<T: Scalar>(m: &StochasticMatrix<T>, x: &[T]) -> T {
    let mut y = vec![T::zero(); x.len()];
    m.matvec(x, &mut y);
    l1_diff(&y, x)
}

fn power_method<T: Scalar>(
    m: &StochasticMatrix<T>,
    opts: &SolveOptions<T>,
) -> Result<SolveReport<T>> {
    let dim = m.dim();
    let mut x: Vec<T> = match &opts.start {
        Some(start) if start.len() == dim => start.clone(),
        Some(_) => {
            return Err(Error::DimensionMismatch(
                "start vector does not match the matrix dimension".into(),
            ))
        }
        None => vec![T::one() / T::from_usize(dim).unwrap(); dim],
    };
    let mut y = vec![T::zero(); dim];
    for iter in 1..=opts.max_iter {
        m.matvec(&x, &mut y);
        let total: T = y.iter().copied().sum();
        for v in y.iter_mut() {
            *v = *v / total;
        }
        let diff = l1_diff(&y, &x);
        std::mem::swap(&mut x, &mut y);
        if diff <= opts.tol {
            let residual = residual_of(m, &x);
            let distribution = finish_distribution(x, m)?;
            return Ok(SolveReport {
                distribution,
                method: Method::Power,
                iterations: iter,
                residual,
                non_unique: false,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        residual: residual_of(m, &x).to_f64().unwrap_or(f64::NAN),
    })
}

fn finish_distribution<T: Scalar>(
    mut probs: Vec<T>,
    m: &StochasticMatrix<T>,
) -> Result<Distribution<T>> {
    // scrub round-off noise so the distribution invariants hold exactly
    for p in probs.iter_mut() {
        if *p < T::zero() {
            *p = T::zero();
        }
    }
    let total: T = probs.iter().copied().sum();
    for p in probs.iter_mut() {
        *p = *p / total;
    }
    Distribution::new(probs, m.ordering().clone())
}

fn direct_method<T: Scalar>(
    m: &StochasticMatrix<T>,
    opts: &SolveOptions<T>,
) -> Result<SolveReport<T>> {
    let dim = m.dim();
    if dim > opts.direct_cap {
        return Err(Error::DimensionTooLarge { dim, cap: opts.direct_cap });
    }

    // (M − I) with the last row replaced by Σπ = 1; the dropped row is the
    // negated sum of the others, so no solution is lost.
    let mut a = vec![T::zero(); dim * dim];
    for (r, c, v) in m.triplets() {
        a[r * dim + c] = v;
    }
    for j in 0..dim {
        a[j * dim + j] = a[j * dim + j] - T::one();
    }
    for j in 0..dim {
        a[(dim - 1) * dim + j] = T::one();
    }
    let mut b = vec![T::zero(); dim];
    b[dim - 1] = T::one();

    let scale = a.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    let pivot_floor = scale * T::epsilon() * T::from_usize(dim.max(16)).unwrap();
    let mut singular = false;

    // Gaussian elimination with partial pivoting
    for k in 0..dim {
        let (pivot_row, pivot_abs) = (k..dim)
            .map(|r| (r, a[r * dim + k].abs()))
            .fold((k, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs <= pivot_floor {
            singular = true;
            break;
        }
        if pivot_row != k {
            for j in 0..dim {
                a.swap(k * dim + j, pivot_row * dim + j);
            }
            b.swap(k, pivot_row);
        }
        let pivot = a[k * dim + k];
        for r in k + 1..dim {
            let factor = a[r * dim + k] / pivot;
            if factor == T::zero() {
                continue;
            }
            a[r * dim + k] = T::zero();
            for j in k + 1..dim {
                a[r * dim + j] = a[r * dim + j] - factor * a[k * dim + j];
            }
            b[r] = b[r] - factor * b[k];
        }
    }

    if !singular {
        let mut x = vec![T::zero(); dim];
        for k in (0..dim).rev() {
            let mut acc = b[k];
            for j in k + 1..dim {
                acc = acc - a[k * dim + j] * x[j];
            }
            x[k] = acc / a[k * dim + k];
        }
        // elimination noise can leave tiny negatives; anything larger means
        // the solution is not a probability vector and the power fallback
        // below takes over
        let floor = -(T::from_f64(1e-9).unwrap_or_else(T::epsilon));
        if x.iter().all(|&v| v >= floor) {
            let residual = residual_of(m, &x);
            let distribution = finish_distribution(x, m)?;
            return Ok(SolveReport {
                distribution,
                method: Method::Direct,
                iterations: 0,
                residual,
                non_unique: false,
            });
        }
    }

    // rank-deficient (several stationary vectors) or numerically invalid:
    // fall back to the power method, which picks one valid fixed point
    let fallback = power_method(m, opts)?;
    Ok(SolveReport {
        non_unique: singular,
        method: Method::Direct,
        ..fallback
    })
}
