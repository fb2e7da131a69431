//! Problem data, residuals, solvability certificates and residual error bounds.
//!
//! A [`GaveProblem`] holds square `A`, `B` and a right-hand side `c` for
//! `Ax - B|x| = c`. When `σ_min(A) > ‖B‖` the equation has exactly one
//! solution `x★` for every `c`, and the residual `r(x) = Ax - B|x| - c`
//! brackets the distance to it:
//!
//! ```text
//! ‖r(x)‖ / (‖A‖ + ‖B‖)  ≤  ‖x - x★‖  ≤  ‖r(x)‖ / (σ_min(A) - ‖B‖)
//! ```

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, check_positive, GaveError, Result};
use crate::linalg::{self, ensure_finite, ensure_square};

/// `Ax - B|x| = c` with square `A`, `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaveProblem {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DVector<f64>,
}

impl GaveProblem {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, c: DVector<f64>) -> Result<Self> {
        let n = ensure_square("A", &a)?;
        ensure_square("B", &b)?;
        if n == 0 {
            return Err(GaveError::InvalidParameter {
                name: "n",
                reason: "dimension must be positive".into(),
            });
        }
        if b.nrows() != n {
            return Err(GaveError::DimensionMismatch {
                what: "B",
                expected: n,
                found: b.nrows(),
            });
        }
        check_len("c", n, c.as_slice())?;
        ensure_finite("A", a.as_slice())?;
        ensure_finite("B", b.as_slice())?;
        ensure_finite("c", c.as_slice())?;
        Ok(Self { a, b, c })
    }

    /// Builds a problem from row-major entry slices.
    pub fn from_row_slices(n: usize, a: &[f64], b: &[f64], c: &[f64]) -> Result<Self> {
        check_len("A", n * n, a)?;
        check_len("B", n * n, b)?;
        check_len("c", n, c)?;
        Self::new(
            DMatrix::from_row_slice(n, n, a),
            DMatrix::from_row_slice(n, n, b),
            DVector::from_column_slice(c),
        )
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    /// `true` when `B` equals the identity to within `1e-12` entrywise.
    pub fn has_identity_b(&self) -> bool {
        self.b
            .iter()
            .enumerate()
            .all(|(k, v)| {
                let (i, j) = (k % self.dim(), k / self.dim());
                let target = if i == j { 1.0 } else { 0.0 };
                (v - target).abs() <= 1e-12
            })
    }

    /// Residual norms at or below this value count as `r = 0`.
    pub fn zero_threshold(&self) -> f64 {
        1e-14 * self.c.norm().max(1.0)
    }

    pub fn residual(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_len("x", self.dim(), x.as_slice())?;
        Ok(self.residual_unchecked(x))
    }

    pub(crate) fn residual_unchecked(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut r = &self.a * x;
        r.gemv(-1.0, &self.b, &linalg::abs(x), 1.0);
        r -= &self.c;
        r
    }
}

/// `r(x) = Ax - B|x| - c`.
pub fn residual(problem: &GaveProblem, x: &DVector<f64>) -> Result<DVector<f64>> {
    problem.residual(x)
}

/// Smallest singular value of a square matrix.
pub fn smallest_singular_value(m: &DMatrix<f64>) -> Result<f64> {
    ensure_square("matrix", m)?;
    ensure_finite("matrix", m.as_slice())?;
    Ok(linalg::extreme_singular_values(m).0)
}

/// Spectral norm (largest singular value) of a square matrix.
pub fn spectral_norm(m: &DMatrix<f64>) -> Result<f64> {
    ensure_square("matrix", m)?;
    ensure_finite("matrix", m.as_slice())?;
    Ok(linalg::extreme_singular_values(m).1)
}

/// Outcome of testing `σ_min(A) > ‖B‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub sigma_min_a: f64,
    /// `‖A‖`, kept for the lower error bound.
    pub norm_a: f64,
    pub norm_b: f64,
    /// `σ_min(A) - ‖B‖`.
    pub gap: f64,
    pub tol: f64,
    pub certified: bool,
}

impl Certificate {
    pub(crate) fn require_certified(&self) -> Result<()> {
        if self.certified {
            Ok(())
        } else {
            Err(GaveError::Uncertified { gap: self.gap })
        }
    }
}

/// Default margin for [`certify_unique`]: `1e-10 · max(1, ‖A‖)`.
pub fn default_certification_tol(norm_a: f64) -> f64 {
    1e-10 * norm_a.max(1.0)
}

/// Certifies unique solvability with an explicit margin `tol`.
pub fn certify_unique(problem: &GaveProblem, tol: f64) -> Certificate {
    let (sigma_min_a, norm_a) = linalg::extreme_singular_values(problem.a());
    let norm_b = linalg::extreme_singular_values(problem.b()).1;
    build_certificate(sigma_min_a, norm_a, norm_b, tol)
}

/// Certifies with the default margin.
pub fn certify(problem: &GaveProblem) -> Certificate {
    let (sigma_min_a, norm_a) = linalg::extreme_singular_values(problem.a());
    let norm_b = linalg::extreme_singular_values(problem.b()).1;
    build_certificate(sigma_min_a, norm_a, norm_b, default_certification_tol(norm_a))
}

fn build_certificate(sigma_min_a: f64, norm_a: f64, norm_b: f64, tol: f64) -> Certificate {
    let gap = sigma_min_a - norm_b;
    Certificate {
        sigma_min_a,
        norm_a,
        norm_b,
        gap,
        tol,
        certified: gap > tol,
    }
}

/// Two-sided bound on `‖x - x★‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBracket {
    pub lower: f64,
    pub upper: f64,
}

impl ErrorBracket {
    pub fn contains(&self, err: f64) -> bool {
        self.lower <= err && err <= self.upper
    }
}

/// Brackets the distance from `x` to the unique solution using only the residual.
pub fn error_bounds(problem: &GaveProblem, cert: &Certificate, x: &DVector<f64>) -> Result<ErrorBracket> {
    cert.require_certified()?;
    let rn = problem.residual(x)?.norm();
    Ok(ErrorBracket {
        lower: rn / (cert.norm_a + cert.norm_b),
        upper: rn / cert.gap,
    })
}

/// `‖r(x)‖ ≤ tol · max(1, ‖c‖)`.
pub fn verify_solution(problem: &GaveProblem, x: &DVector<f64>, tol: f64) -> Result<bool> {
    check_positive("tol", tol)?;
    let rn = problem.residual(x)?.norm();
    Ok(rn <= tol * problem.c().norm().max(1.0))
}
