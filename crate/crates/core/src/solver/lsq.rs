//! Least squares by a column-incremental QR factorization.
//!
//! Columns are orthogonalized with classical Gram-Schmidt run twice (CGS2),
//! which keeps `Q` orthonormal to working precision.

use crate::error::{Error, Result};
use crate::linalg::{dot_conj, norm, CMatrix, C64};

/// Relative size of the orthogonal component below which a new column is
/// treated as linearly dependent.
pub const RANK_TOL: f64 = 1e-10;

/// `min ‖y - A h‖₂` with `A` grown one column at a time.
#[derive(Clone, Debug)]
pub struct IncrementalLeastSquares {
    target: Vec<C64>,
    q: Vec<Vec<C64>>,
    /// Column `j` of R holds `j + 1` entries.
    r: Vec<Vec<C64>>,
    /// `Q^H y`
    qty: Vec<C64>,
}

impl IncrementalLeastSquares {
    pub fn new(target: &[C64]) -> Self {
        Self {
            target: target.to_vec(),
            q: Vec::new(),
            r: Vec::new(),
            qty: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// Appends a column. On rank deficiency the factorization is left
    /// unchanged.
    pub fn push_column(&mut self, col: &[C64]) -> Result<()> {
        if col.len() != self.target.len() {
            return Err(Error::DimensionMismatch {
                expected: self.target.len(),
                got: col.len(),
            });
        }
        let col_norm = norm(col);
        let mut v = col.to_vec();
        let mut rcol = vec![C64::new(0.0, 0.0); self.q.len() + 1];
        for _ in 0..2 {
            for (qi, ri) in self.q.iter().zip(rcol.iter_mut()) {
                let c = dot_conj(qi, &v);
                for (vv, &qq) in v.iter_mut().zip(qi) {
                    *vv -= c * qq;
                }
                *ri += c;
            }
        }
        let rest = norm(&v);
        if col_norm == 0.0 || rest <= RANK_TOL * col_norm {
            return Err(Error::RankDeficient { column: self.q.len() });
        }
        v.iter_mut().for_each(|z| *z /= rest);
        rcol[self.q.len()] = C64::new(rest, 0.0);
        self.qty.push(dot_conj(&v, &self.target));
        self.q.push(v);
        self.r.push(rcol);
        Ok(())
    }

    /// Solves `R h = Q^H y` by back substitution.
    pub fn coefficients(&self) -> Vec<C64> {
        let n = self.q.len();
        let mut h = self.qty.clone();
        for i in (0..n).rev() {
            let mut s = h[i];
            for (j, hj) in h.iter().enumerate().take(n).skip(i + 1) {
                s -= self.r[j][i] * hj;
            }
            h[i] = s / self.r[i][i];
        }
        h
    }

    /// `y - Q Q^H y`, the least-squares residual.
    pub fn residual(&self) -> Vec<C64> {
        let mut res = self.target.clone();
        for (qi, &c) in self.q.iter().zip(&self.qty) {
            for (rr, &qq) in res.iter_mut().zip(qi) {
                *rr -= c * qq;
            }
        }
        res
    }
}

/// `argmin_h ‖y - A h‖₂` for a full-column-rank `A`.
pub fn least_squares(a: &CMatrix, y: &[C64]) -> Result<Vec<C64>> {
    if a.rows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: y.len(),
        });
    }
    let mut ls = IncrementalLeastSquares::new(y);
    for j in 0..a.cols() {
        ls.push_column(a.column(j))?;
    }
    Ok(ls.coefficients())
}
