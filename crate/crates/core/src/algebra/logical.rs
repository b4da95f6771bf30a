//! Logical matrices: zero/one matrices with exactly one 1 per column.
//!
//! A logical matrix is stored as its column-index sequence: `delta(r, [c1,
//! c2, …])` is the `r × k` matrix whose `j`-th column is the basis vector
//! with a 1 in row `c_j`. Indices are 1-based throughout, matching the
//! delta-vector convention used by all structure matrices.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::dense::DenseMatrix;

#[derive(Clone, PartialEq, Eq)]
pub struct LogicalMatrix {
    rows: usize,
    col_index: Vec<usize>,
}

impl std::fmt::Debug for LogicalMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.dump_line())
    }
}

/// Row index of the Kronecker product of two basis columns:
/// `δ_a^i ⊗ δ_b^j = δ_(a·b)^((i-1)·b + j)`.
#[inline]
pub(crate) fn delta_pair(i: usize, b: usize, j: usize) -> usize {
    (i - 1) * b + j
}

impl LogicalMatrix {
    /// Builds `delta(rows, col_index)`; every index must lie in `1..=rows`.
    pub fn new(rows: usize, col_index: Vec<usize>) -> Result<Self> {
        if rows == 0 {
            return Err(Error::DimensionMismatch("logical matrix needs rows > 0".into()));
        }
        if let Some(&bad) = col_index.iter().find(|&&c| c == 0 || c > rows) {
            return Err(Error::IndexOutOfRange {
                what: "logical column index",
                index: bad,
                limit: rows,
            });
        }
        Ok(Self { rows, col_index })
    }

    /// The `k × k` identity.
    pub fn identity(k: usize) -> Self {
        Self { rows: k, col_index: (1..=k).collect() }
    }

    /// The basis column `δ_rows^k` as a one-column matrix.
    pub fn delta_column(rows: usize, k: usize) -> Result<Self> {
        Self::new(rows, vec![k])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.col_index.len()
    }

    pub fn col_index(&self) -> &[usize] {
        &self.col_index
    }

    /// 1-based row of the 1 in 0-based column `j`.
    pub fn column(&self, j: usize) -> usize {
        self.col_index[j]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.col_index.len()
    }

    /// Kronecker product on the index representation: column `(jx, jy)` of
    /// the result carries `δ^((cx-1)·ry + cy)`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let rows = self
            .rows
            .checked_mul(other.rows)
            .ok_or(Error::DimensionOverflow)?;
        let cols = self
            .cols()
            .checked_mul(other.cols())
            .ok_or(Error::DimensionOverflow)?;
        let mut col_index = Vec::with_capacity(cols);
        for &cx in &self.col_index {
            for &cy in &other.col_index {
                col_index.push(delta_pair(cx, other.rows, cy));
            }
        }
        Ok(Self { rows, col_index })
    }

    /// Column-wise Khatri-Rao product: column `j` of the result is the
    /// Kronecker product of the operands' `j`-th columns. Column counts
    /// must agree.
    pub fn khatri_rao(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.cols() {
            return Err(Error::DimensionMismatch(format!(
                "Khatri-Rao needs equal column counts, got {} and {}",
                self.cols(),
                other.cols()
            )));
        }
        let rows = self
            .rows
            .checked_mul(other.rows)
            .ok_or(Error::DimensionOverflow)?;
        let col_index = self
            .col_index
            .iter()
            .zip(&other.col_index)
            .map(|(&cx, &cy)| delta_pair(cx, other.rows, cy))
            .collect();
        Ok(Self { rows, col_index })
    }

    /// Ordinary matrix product of logical matrices (`self.cols == other.rows`):
    /// composition of column selections.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "product needs cols {} = rows {}",
                self.cols(),
                other.rows
            )));
        }
        let col_index = other.col_index.iter().map(|&c| self.col_index[c - 1]).collect();
        Ok(Self { rows: self.rows, col_index })
    }

    /// Dense zero/one expansion.
    pub fn to_dense<T: Scalar>(&self) -> DenseMatrix<T> {
        let mut dense = DenseMatrix::zeros(self.rows, self.cols());
        for (j, &c) in self.col_index.iter().enumerate() {
            dense.set(c - 1, j, T::one());
        }
        dense
    }

    /// Dump format consumed by the CLI: `delta <rows> [c1 c2 … ck]`.
    pub fn dump_line(&self) -> String {
        let cols: Vec<String> = self.col_index.iter().map(|c| c.to_string()).collect();
        format!("delta {} [{}]", self.rows, cols.join(" "))
    }
}

/// Left semi-tensor product of logical matrices in exact index arithmetic:
/// with `t = lcm(cols(x), rows(y))`, computes
/// `(x ⊗ I_(t/cols(x))) · (y ⊗ I_(t/rows(y)))`.
pub fn stp_logical(x: &LogicalMatrix, y: &LogicalMatrix) -> Result<LogicalMatrix> {
    let t = lcm(x.cols(), y.rows())?;
    let left = x.kron(&LogicalMatrix::identity(t / x.cols()))?;
    let right = y.kron(&LogicalMatrix::identity(t / y.rows()))?;
    left.compose(&right)
}

pub(crate) fn lcm(a: usize, b: usize) -> Result<usize> {
    let g = gcd(a, b);
    (a / g).checked_mul(b).ok_or(Error::DimensionOverflow)
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}
