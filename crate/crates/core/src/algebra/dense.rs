//! Dense row-major matrices. General operands for the matrix products; the
//! structure-matrix pipeline itself never expands to dense form.

use std::io::Write;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::logical::lcm;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch("dense matrix needs positive dimensions".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::DimensionMismatch("dense matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Self::zeros(k, k);
        for i in 0..k {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product: block `(i, j)` of the result is `self[i,j] · other`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let rows = self.rows.checked_mul(other.rows).ok_or(Error::DimensionOverflow)?;
        let cols = self.cols.checked_mul(other.cols).ok_or(Error::DimensionOverflow)?;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let scale = self.get(i, j);
                if scale == T::zero() {
                    continue;
                }
                for r in 0..other.rows {
                    for c in 0..other.cols {
                        out.set(i * other.rows + r, j * other.cols + c, scale * other.get(r, c));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Option<T> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        Some(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| (a - b).abs())
                .fold(T::zero(), T::max),
        )
    }

    /// Headerless CSV dump, one row per line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| format!("{}", self.get(r, c))).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Left semi-tensor product: with `t = lcm(cols(x), rows(y))`, computes
/// `(x ⊗ I_(t/cols(x))) · (y ⊗ I_(t/rows(y)))`. Reduces to the ordinary
/// product when `cols(x) = rows(y)`.
pub fn stp_dense<T: Scalar>(x: &DenseMatrix<T>, y: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let t = lcm(x.cols(), y.rows())?;
    let left = x.kron(&DenseMatrix::identity(t / x.cols()))?;
    let right = y.kron(&DenseMatrix::identity(t / y.rows()))?;
    left.matmul(&right)
}
