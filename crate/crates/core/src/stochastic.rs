//! Sparse column-stochastic matrices and probability distributions over
//! configurations.

use std::sync::Arc;

use crate::algebra::structure::transition_structure_matrix;
use crate::error::{Error, Result};
use crate::model::{normalize_rates, ModelSpec};
use crate::scalar::Scalar;

/// Which configurations a matrix or distribution is indexed by, and in what
/// order. Positions are 0-based delta positions (`delta_index − 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateOrdering {
    /// All `m^N` configurations in delta order.
    Full { states: usize },
    /// A subset of configurations, listed by ascending delta position.
    Restricted {
        states: usize,
        members: Arc<Vec<usize>>,
    },
}

impl StateOrdering {
    pub fn full(states: usize) -> Self {
        StateOrdering::Full { states }
    }

    pub fn restricted(states: usize, members: Vec<usize>) -> Self {
        StateOrdering::Restricted { states, members: Arc::new(members) }
    }

    /// Number of indexed configurations.
    pub fn dim(&self) -> usize {
        match self {
            StateOrdering::Full { states } => *states,
            StateOrdering::Restricted { members, .. } => members.len(),
        }
    }

    /// Size of the unrestricted state space.
    pub fn full_states(&self) -> usize {
        match self {
            StateOrdering::Full { states } | StateOrdering::Restricted { states, .. } => *states,
        }
    }

    /// Delta position in the full state space of local index `i`.
    pub fn to_full_position(&self, i: usize) -> usize {
        match self {
            StateOrdering::Full { .. } => i,
            StateOrdering::Restricted { members, .. } => members[i],
        }
    }

    /// Local index of a full-space delta position, if it is indexed.
    pub fn position_of(&self, full_pos: usize) -> Option<usize> {
        match self {
            StateOrdering::Full { states } => (full_pos < *states).then_some(full_pos),
            StateOrdering::Restricted { members, .. } => members.binary_search(&full_pos).ok(),
        }
    }
}

fn stochastic_tol<T: Scalar>() -> T {
    let floor = T::from_f64(1e-12).unwrap_or_else(T::epsilon);
    floor.max(T::epsilon() * T::from_u32(64).unwrap())
}

fn distribution_tol<T: Scalar>() -> T {
    let floor = T::from_f64(1e-10).unwrap_or_else(T::epsilon);
    floor.max(T::epsilon() * T::from_u32(64).unwrap())
}

/// Sparse column-stochastic matrix in compressed-column form.
#[derive(Debug, Clone)]
pub struct StochasticMatrix<T> {
    dim: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<T>,
    ordering: StateOrdering,
}

impl<T: Scalar> StochasticMatrix<T> {
    /// Builds from per-column `(row, value)` lists, merging duplicate rows.
    /// Every column must sum to 1 (within a tight tolerance) and every entry
    /// must lie in `[0, 1]`.
    pub fn from_columns(columns: Vec<Vec<(usize, T)>>, ordering: StateOrdering) -> Result<Self> {
        let dim = columns.len();
        if dim != ordering.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} columns for an ordering of {} configurations",
                dim,
                ordering.dim()
            )));
        }
        let tol = stochastic_tol::<T>();
        let mut col_ptr = Vec::with_capacity(dim + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for (j, mut col) in columns.into_iter().enumerate() {
            col.sort_unstable_by_key(|&(r, _)| r);
            let mut merged: Vec<(usize, T)> = Vec::with_capacity(col.len());
            for (r, v) in col {
                if r >= dim {
                    return Err(Error::IndexOutOfRange { what: "row", index: r, limit: dim });
                }
                match merged.last_mut() {
                    Some((lr, lv)) if *lr == r => *lv = *lv + v,
                    _ => merged.push((r, v)),
                }
            }
            let mut sum = T::zero();
            for &(r, v) in &merged {
                if v < T::zero() || v > T::one() + tol {
                    return Err(Error::NotStochastic {
                        column: j + 1,
                        sum: v.to_f64().unwrap_or(f64::NAN),
                    });
                }
                sum = sum + v;
                row_idx.push(r);
                values.push(v);
            }
            if (sum - T::one()).abs() > tol {
                return Err(Error::NotStochastic {
                    column: j + 1,
                    sum: sum.to_f64().unwrap_or(f64::NAN),
                });
            }
            col_ptr.push(row_idx.len());
        }
        Ok(Self { dim, col_ptr, row_idx, values, ordering })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ordering(&self) -> &StateOrdering {
        &self.ordering
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    /// Entries of column `j` as `(row, value)` pairs, rows ascending.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        self.row_idx[range.clone()]
            .iter()
            .zip(&self.values[range])
            .map(|(&r, &v)| (r, v))
    }

    pub fn column_sum(&self, j: usize) -> T {
        self.column(j).map(|(_, v)| v).sum()
    }

    /// Dense entry accessor, for small cross-checks.
    pub fn get(&self, r: usize, c: usize) -> T {
        self.column(c)
            .find_map(|(row, v)| (row == r).then_some(v))
            .unwrap_or_else(T::zero)
    }

    /// `y = M · x`.
    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        y.fill(T::zero());
        for (j, &xj) in x.iter().enumerate() {
            if xj == T::zero() {
                continue;
            }
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                y[self.row_idx[k]] = y[self.row_idx[k]] + self.values[k] * xj;
            }
        }
    }

    /// All nonzero entries as `(row, col, value)` in column-major order,
    /// indices 0-based.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.dim).flat_map(move |j| self.column(j).map(move |(r, v)| (r, j, v)))
    }
}

/// Assembles the transition matrix `M = Σ p(τ) · M^τ` of a model: every
/// transition's structure matrix contributes its normalized rate to the
/// successor row of each column.
pub fn assemble<T: Scalar>(model: &ModelSpec<T>) -> Result<StochasticMatrix<T>> {
    let probs = normalize_rates(model)?;
    let states = model.lattice().state_count();
    let mut columns: Vec<Vec<(usize, T)>> = vec![Vec::new(); states];
    for (t, &p) in model.transitions().iter().zip(&probs) {
        if p <= T::zero() {
            continue;
        }
        let mtau = transition_structure_matrix(t)?;
        for (j, col) in columns.iter_mut().enumerate() {
            col.push((mtau.column(j) - 1, p));
        }
    }
    StochasticMatrix::from_columns(columns, StateOrdering::full(states))
}

/// Restricts a full matrix to the given delta positions (ascending). Fails
/// if any column's mass falls outside the set.
pub fn restrict<T: Scalar>(
    m: &StochasticMatrix<T>,
    members: &[usize],
) -> Result<StochasticMatrix<T>> {
    if members.is_empty() {
        return Err(Error::EmptyStateSet);
    }
    let StateOrdering::Full { states } = *m.ordering() else {
        return Err(Error::DimensionMismatch(
            "matrix is already restricted".into(),
        ));
    };
    if *members.last().unwrap() >= states {
        return Err(Error::IndexOutOfRange {
            what: "restriction member",
            index: *members.last().unwrap(),
            limit: states,
        });
    }
    let ordering = StateOrdering::restricted(states, members.to_vec());
    let mut columns = Vec::with_capacity(members.len());
    for (local, &full) in members.iter().enumerate() {
        let mut col = Vec::new();
        for (row, v) in m.column(full) {
            match ordering.position_of(row) {
                Some(r) => col.push((r, v)),
                None => {
                    return Err(Error::ClosureViolation {
                        state: format!("delta index {}", full + 1),
                        transition: format!("column {}", local + 1),
                        successor: format!("delta index {}", row + 1),
                    })
                }
            }
        }
        columns.push(col);
    }
    StochasticMatrix::from_columns(columns, ordering)
}

/// A probability vector over configurations, tagged with its ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T> {
    probs: Vec<T>,
    ordering: StateOrdering,
}

impl<T: Scalar> Distribution<T> {
    /// Validates nonnegativity and unit total mass.
    pub fn new(probs: Vec<T>, ordering: StateOrdering) -> Result<Self> {
        if probs.len() != ordering.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} probabilities for an ordering of {} configurations",
                probs.len(),
                ordering.dim()
            )));
        }
        if probs.iter().any(|p| *p < T::zero() || !p.is_finite()) {
            return Err(Error::InvalidState("probabilities must be nonnegative".into()));
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > distribution_tol::<T>() {
            return Err(Error::InvalidState(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { probs, ordering })
    }

    pub fn uniform(ordering: StateOrdering) -> Self {
        let dim = ordering.dim();
        let p = T::one() / T::from_usize(dim).unwrap();
        Self { probs: vec![p; dim], ordering }
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn ordering(&self) -> &StateOrdering {
        &self.ordering
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    /// Probability of the configuration at full-space delta position
    /// `full_pos`, zero if it is not indexed.
    pub fn prob_at_full_position(&self, full_pos: usize) -> T {
        self.ordering
            .position_of(full_pos)
            .map_or_else(T::zero, |i| self.probs[i])
    }

    /// `‖a − b‖₁`; orderings must match.
    pub fn l1_distance(&self, other: &Self) -> Result<T> {
        if self.ordering != other.ordering {
            return Err(Error::OrderingMismatch);
        }
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(&a, &b)| (a - b).abs())
            .sum())
    }
}
