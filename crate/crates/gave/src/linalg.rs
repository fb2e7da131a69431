//! Small dense kernels shared by the solver modules.
//!
//! Singular values come from one-sided (Hestenes) Jacobi: plane rotations
//! chosen from the entries of the Gram matrix `MᵀM` are applied to the
//! columns of `M` until every column pair is orthogonal. This diagonalizes
//! the Gram matrix without ever forming it, so small singular values keep
//! their relative accuracy.

use nalgebra::{DMatrix, DVector};

use crate::error::{GaveError, Result};

const MAX_SWEEPS: usize = 80;

/// Relative pivot threshold below which an LU factor is treated as singular.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

pub(crate) fn ensure_square(what: &'static str, m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(GaveError::NotSquare {
            what,
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub(crate) fn ensure_finite(what: &'static str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(GaveError::NonFinite(what))
    }
}

/// All singular values of `m`, unordered.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut u = m.clone();
    let (rows, cols) = u.shape();
    if cols == 0 {
        return Vec::new();
    }
    let eps = f64::EPSILON;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols.saturating_sub(1) {
            for q in (p + 1)..cols {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..rows {
                    let up = u[(i, p)];
                    let uq = u[(i, q)];
                    alpha += up * up;
                    beta += uq * uq;
                    gamma += up * uq;
                }
                if gamma == 0.0 || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for i in 0..rows {
                    let up = u[(i, p)];
                    let uq = u[(i, q)];
                    u[(i, p)] = cs * up - sn * uq;
                    u[(i, q)] = sn * up + cs * uq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    (0..cols).map(|j| u.column(j).norm()).collect()
}

/// `(σ_min, σ_max)` of a square matrix.
pub fn extreme_singular_values(m: &DMatrix<f64>) -> (f64, f64) {
    let sv = singular_values(m);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let max = sv.iter().copied().fold(0.0, f64::max);
    (if min.is_finite() { min } else { 0.0 }, max)
}

pub(crate) fn abs(x: &DVector<f64>) -> DVector<f64> {
    x.map(f64::abs)
}

/// LU factorization with partial pivoting and a relative pivot test.
#[derive(Debug, Clone)]
pub struct LuSolver {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl LuSolver {
    pub fn new(what: &'static str, m: &DMatrix<f64>) -> Result<Self> {
        ensure_square(what, m)?;
        let lu = m.clone().lu();
        let diag = lu.u().diagonal();
        let max = diag.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        let min = diag.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
        if diag.is_empty() || max == 0.0 || min <= PIVOT_TOLERANCE * max {
            return Err(GaveError::Singular(what));
        }
        Ok(Self { lu })
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        // Pivots were checked at construction.
        self.lu.solve(rhs).expect("factor verified nonsingular")
    }
}
