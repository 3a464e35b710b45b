//! Finite lower-triangular blocks and exact forward substitution.

use num_traits::{One, Zero};

use super::Triangle;
use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::exec::Exec;

/// An `N x N` lower-triangular block; row `n` stores columns `0..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseWindow {
    rows: Vec<Vec<Rational>>,
}

impl DenseWindow {
    /// Builds from full or lower-triangular rows. Entries above the
    /// diagonal must be zero.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyWindow);
        }
        let mut out = Vec::with_capacity(rows.len());
        for (n, mut row) in rows.into_iter().enumerate() {
            if row.iter().skip(n + 1).any(|v| !v.is_zero()) {
                return Err(Error::IndexOutOfRange(format!(
                    "row {n} has a nonzero entry above the diagonal"
                )));
            }
            row.resize(n + 1, Rational::zero());
            out.push(row);
        }
        Ok(DenseWindow { rows: out })
    }

    pub(crate) fn from_rows_unchecked(rows: Vec<Vec<Rational>>) -> Self {
        DenseWindow { rows }
    }

    pub fn identity(size: usize) -> Self {
        let rows = (0..size)
            .map(|n| {
                let mut r = vec![Rational::zero(); n + 1];
                r[n] = Rational::one();
                r
            })
            .collect();
        DenseWindow { rows }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, n: usize, k: usize) -> &Rational {
        &self.rows[n][k]
    }

    /// Zero above the diagonal and outside the block.
    pub fn entry(&self, n: usize, k: usize) -> Rational {
        if k > n || n >= self.size() {
            Rational::zero()
        } else {
            self.rows[n][k].clone()
        }
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    /// One past the last row holding a nonzero entry.
    pub fn nonzero_rows(&self) -> usize {
        self.rows
            .iter()
            .rposition(|r| r.iter().any(|v| !v.is_zero()))
            .map_or(0, |i| i + 1)
    }

    pub fn is_identity(&self) -> bool {
        self.rows.iter().enumerate().all(|(n, r)| {
            r.iter()
                .enumerate()
                .all(|(k, v)| if k == n { v.is_one() } else { v.is_zero() })
        })
    }

    /// `self * other` on the common block.
    pub fn matmul(&self, other: &DenseWindow, exec: Exec) -> Result<DenseWindow> {
        if self.size() != other.size() {
            return Err(Error::WindowMismatch {
                expected: self.size(),
                got: other.size(),
            });
        }
        let rows = exec.map(self.size(), |n| {
            (0..=n)
                .map(|k| {
                    let mut acc = Rational::zero();
                    for j in k..=n {
                        let a = &self.rows[n][j];
                        if !a.is_zero() {
                            acc += a * &other.rows[j][k];
                        }
                    }
                    acc
                })
                .collect()
        });
        Ok(DenseWindow { rows })
    }

    pub fn apply(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        if x.len() != self.size() {
            return Err(Error::WindowMismatch {
                expected: self.size(),
                got: x.len(),
            });
        }
        Ok(self
            .rows
            .iter()
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }
}

/// The exact inverse of the leading `size x size` block.
pub fn triangle_invert(a: &Triangle, size: usize) -> Result<DenseWindow> {
    triangle_invert_with(a, size, Exec::default())
}

/// Column-parallel forward substitution: column `k` of the inverse solves
/// `A x = e_k`, independently of every other column.
pub fn triangle_invert_with(a: &Triangle, size: usize, exec: Exec) -> Result<DenseWindow> {
    if size == 0 {
        return Err(Error::EmptyWindow);
    }
    let block = a.window_with(size, exec);
    let mut diag_inv = Vec::with_capacity(size);
    for n in 0..size {
        let d = block.get(n, n);
        if d.is_zero() {
            return Err(Error::SingularDiagonal(n));
        }
        diag_inv.push(d.recip());
    }
    let columns: Vec<Vec<Rational>> = exec.map(size, |k| {
        // entries k..size of column k
        let mut col: Vec<Rational> = Vec::with_capacity(size - k);
        col.push(diag_inv[k].clone());
        for n in k + 1..size {
            let mut acc = Rational::zero();
            for j in k..n {
                let c = &col[j - k];
                if c.is_zero() {
                    continue;
                }
                let a = block.get(n, j);
                if !a.is_zero() {
                    acc += a * c;
                }
            }
            col.push(-acc * &diag_inv[n]);
        }
        col
    });
    let rows = (0..size)
        .map(|n| (0..=n).map(|k| columns[k][n - k].clone()).collect())
        .collect();
    Ok(DenseWindow::from_rows_unchecked(rows))
}

/// Solves `A x = y` by forward substitution.
pub fn triangle_solve(a: &Triangle, y: &[Rational]) -> Result<Vec<Rational>> {
    if y.is_empty() {
        return Err(Error::EmptyWindow);
    }
    if let Some(rows) = a.defined_rows() {
        if rows < y.len() {
            return Err(Error::WindowMismatch {
                expected: rows,
                got: y.len(),
            });
        }
    }
    let mut x: Vec<Rational> = Vec::with_capacity(y.len());
    for (n, yn) in y.iter().enumerate() {
        let d = a.entry(n, n);
        if d.is_zero() {
            return Err(Error::SingularDiagonal(n));
        }
        let mut acc = yn.clone();
        for (k, xk) in x.iter().enumerate() {
            if !xk.is_zero() {
                acc -= a.entry(n, k) * xk;
            }
        }
        x.push(acc / d);
    }
    Ok(x)
}
