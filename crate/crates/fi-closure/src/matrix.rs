//! Dense exact matrices over the rationals.
//!
//! Determinants dispatch on size: cofactor expansion up to 4x4, fraction-free
//! Bareiss elimination above that (rows are scaled to integers first, so the
//! elimination never produces intermediate fractions). Rank uses the same
//! fraction-free scheme with full pivoting.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<Scalar>,
}

impl QMatrix {
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<QMatrix> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        for r in &rows {
            if r.len() != ncols {
                return Err(Error::BadMatrix { reason: "ragged rows".into() });
            }
        }
        Ok(QMatrix { nrows, ncols, data: rows.into_iter().flatten().collect() })
    }

    pub fn zeros(nrows: usize, ncols: usize) -> QMatrix {
        QMatrix { nrows, ncols, data: vec![Scalar::zero(); nrows * ncols] }
    }

    pub fn identity(n: usize) -> QMatrix {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.get_mut(i, i) = Scalar::one();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.ncols + c]
    }

    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut Scalar {
        &mut self.data[r * self.ncols + c]
    }

    /// Exact determinant; errors on non-square input.
    pub fn det(&self) -> Result<Scalar> {
        if self.nrows != self.ncols {
            return Err(Error::BadMatrix {
                reason: format!("determinant of a {}x{} matrix", self.nrows, self.ncols),
            });
        }
        if self.nrows <= 4 {
            Ok(self.det_cofactor())
        } else {
            Ok(self.det_bareiss())
        }
    }

    /// Cofactor expansion along the first row; intended for small matrices
    /// and as an independent cross-check of the elimination path.
    pub(crate) fn det_cofactor(&self) -> Scalar {
        let n = self.nrows;
        if n == 0 {
            return Scalar::one();
        }
        if n == 1 {
            return self.get(0, 0).clone();
        }
        let mut total = Scalar::zero();
        for c in 0..n {
            let a = self.get(0, c);
            if a.is_zero() {
                continue;
            }
            let mut sub = Vec::with_capacity(n - 1);
            for r in 1..n {
                let mut row = Vec::with_capacity(n - 1);
                for cc in 0..n {
                    if cc != c {
                        row.push(self.get(r, cc).clone());
                    }
                }
                sub.push(row);
            }
            let minor = QMatrix::from_rows(sub).expect("square submatrix").det_cofactor();
            let signed = if c % 2 == 0 { a * &minor } else { -&(a * &minor) };
            total += &signed;
        }
        total
    }

    /// Fraction-free Bareiss determinant: rows are cleared to integers, the
    /// elimination works in BigInt with exact divisions, and the row scaling
    /// is divided back out at the end.
    pub(crate) fn det_bareiss(&self) -> Scalar {
        let n = self.nrows;
        if n == 0 {
            return Scalar::one();
        }
        let (mut b, row_scale) = self.integer_rows();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if b[k][k].is_zero() {
                match (k + 1..n).find(|&r| !b[r][k].is_zero()) {
                    Some(r) => {
                        b.swap(k, r);
                        sign = -sign;
                    }
                    None => return Scalar::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &b[i][j] * &b[k][k] - &b[i][k] * &b[k][j];
                    b[i][j] = num / &prev; // exact by the Bareiss identity
                }
                b[i][k] = BigInt::zero();
            }
            prev = b[k][k].clone();
        }
        let det_int = b[n - 1][n - 1].clone() * BigInt::from(sign);
        let mut scale = BigInt::one();
        for s in row_scale {
            scale *= s;
        }
        Scalar::from_big(num_rational::BigRational::new(det_int, scale))
    }

    /// Rank via fraction-free elimination with full pivoting.
    pub fn rank(&self) -> usize {
        if self.nrows == 0 || self.ncols == 0 {
            return 0;
        }
        let (mut b, _) = self.integer_rows();
        let nr = self.nrows;
        let nc = self.ncols;
        let mut prev = BigInt::one();
        let mut rank = 0;
        for step in 0..nr.min(nc) {
            // Full pivot search over the remaining block.
            let mut pivot = None;
            'outer: for r in step..nr {
                for c in step..nc {
                    if !b[r][c].is_zero() {
                        pivot = Some((r, c));
                        break 'outer;
                    }
                }
            }
            let Some((pr, pc)) = pivot else { break };
            b.swap(step, pr);
            if pc != step {
                for row in b.iter_mut() {
                    row.swap(step, pc);
                }
            }
            rank += 1;
            for i in step + 1..nr {
                for j in step + 1..nc {
                    let num = &b[i][j] * &b[step][step] - &b[i][step] * &b[step][j];
                    b[i][j] = num / &prev;
                }
                b[i][step] = BigInt::zero();
            }
            prev = b[step][step].clone();
        }
        rank
    }

    /// Exact inverse by Gauss-Jordan; None when singular.
    pub fn inverse(&self) -> Result<Option<QMatrix>> {
        if self.nrows != self.ncols {
            return Err(Error::BadMatrix {
                reason: format!("inverse of a {}x{} matrix", self.nrows, self.ncols),
            });
        }
        let n = self.nrows;
        let mut a = self.clone();
        let mut inv = QMatrix::identity(n);
        for col in 0..n {
            let Some(pivot_row) = (col..n).find(|&r| !a.get(r, col).is_zero()) else {
                return Ok(None);
            };
            if pivot_row != col {
                for c in 0..n {
                    let i = col * n + c;
                    let j = pivot_row * n + c;
                    a.data.swap(i, j);
                    inv.data.swap(i, j);
                }
            }
            let pivot_inv = a.get(col, col).invert().expect("nonzero pivot");
            for c in 0..n {
                *a.get_mut(col, c) *= &pivot_inv;
                *inv.get_mut(col, c) *= &pivot_inv;
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for c in 0..n {
                    let t = &factor * a.get(col, c);
                    *a.get_mut(r, c) -= &t;
                    let t = &factor * inv.get(col, c);
                    *inv.get_mut(r, c) -= &t;
                }
            }
        }
        Ok(Some(inv))
    }

    /// Scale each row to integers; returns the BigInt matrix and per-row
    /// multipliers (always positive).
    fn integer_rows(&self) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
        let mut rows = Vec::with_capacity(self.nrows);
        let mut scales = Vec::with_capacity(self.nrows);
        for r in 0..self.nrows {
            let mut lcm = BigInt::one();
            for c in 0..self.ncols {
                lcm = lcm.lcm(self.get(r, c).denom());
            }
            let lcm = lcm.abs();
            let row = (0..self.ncols)
                .map(|c| {
                    let s = self.get(r, c);
                    s.numer() * (&lcm / s.denom())
                })
                .collect();
            rows.push(row);
            scales.push(lcm);
        }
        (rows, scales)
    }
}
