//! Bridges between complementarity problems and GAVE.
//!
//! * LCP `w = Mz + q ≥ 0, z ≥ 0, wᵀz = 0` becomes `(M+I)x - (M-I)|x| = q`;
//!   a solution `x` gives back `z = (M - I)⁻¹(2x - q)`.
//! * HLCP `Cz - Dw = p` becomes GAVE with `A = (C+D)/2`, `B = (D-C)/2`,
//!   `c = p`. A GAVE solution splits into `z = max(x, 0)`, `w = max(-x, 0)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, check_positive, GaveError, Result};
use crate::linalg::{ensure_finite, ensure_square, LuSolver};
use crate::problem::GaveProblem;

#[derive(Debug, Clone, PartialEq)]
pub struct LcpProblem {
    m: DMatrix<f64>,
    q: DVector<f64>,
}

impl LcpProblem {
    pub fn new(m: DMatrix<f64>, q: DVector<f64>) -> Result<Self> {
        let l = ensure_square("M", &m)?;
        if l == 0 {
            return Err(GaveError::InvalidParameter {
                name: "l",
                reason: "dimension must be positive".into(),
            });
        }
        check_len("q", l, q.as_slice())?;
        ensure_finite("M", m.as_slice())?;
        ensure_finite("q", q.as_slice())?;
        Ok(Self { m, q })
    }

    pub fn from_row_slices(l: usize, m: &[f64], q: &[f64]) -> Result<Self> {
        check_len("M", l * l, m)?;
        check_len("q", l, q)?;
        Self::new(DMatrix::from_row_slice(l, l, m), DVector::from_column_slice(q))
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn m(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn q(&self) -> &DVector<f64> {
        &self.q
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HlcpProblem {
    c: DMatrix<f64>,
    d: DMatrix<f64>,
    p: DVector<f64>,
}

impl HlcpProblem {
    pub fn new(c: DMatrix<f64>, d: DMatrix<f64>, p: DVector<f64>) -> Result<Self> {
        let l = ensure_square("C", &c)?;
        ensure_square("D", &d)?;
        if l == 0 {
            return Err(GaveError::InvalidParameter {
                name: "l",
                reason: "dimension must be positive".into(),
            });
        }
        if d.nrows() != l {
            return Err(GaveError::DimensionMismatch {
                what: "D",
                expected: l,
                found: d.nrows(),
            });
        }
        check_len("p", l, p.as_slice())?;
        ensure_finite("C", c.as_slice())?;
        ensure_finite("D", d.as_slice())?;
        ensure_finite("p", p.as_slice())?;
        Ok(Self { c, d, p })
    }

    pub fn from_row_slices(l: usize, c: &[f64], d: &[f64], p: &[f64]) -> Result<Self> {
        check_len("C", l * l, c)?;
        check_len("D", l * l, d)?;
        check_len("p", l, p)?;
        Self::new(
            DMatrix::from_row_slice(l, l, c),
            DMatrix::from_row_slice(l, l, d),
            DVector::from_column_slice(p),
        )
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn d(&self) -> &DMatrix<f64> {
        &self.d
    }

    pub fn p(&self) -> &DVector<f64> {
        &self.p
    }
}

/// Sign and complementarity summary for a candidate LCP solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplementarityReport {
    pub min_z: f64,
    pub min_w: f64,
    pub inner_product: f64,
    pub feasible: bool,
    pub complementary: bool,
}

impl ComplementarityReport {
    pub fn solved(&self) -> bool {
        self.feasible && self.complementary
    }
}

/// `A = M + I`, `B = M - I`, `c = q`.
pub fn lcp_to_gave(lcp: &LcpProblem) -> GaveProblem {
    let l = lcp.dim();
    let identity = DMatrix::<f64>::identity(l, l);
    GaveProblem::new(lcp.m() + &identity, lcp.m() - &identity, lcp.q().clone())
        .expect("shapes and finiteness carried over from the LCP")
}

/// Solves `(M - I) z = 2x - q` for the LCP variable.
pub fn recover_lcp_solution(lcp: &LcpProblem, x: &DVector<f64>) -> Result<DVector<f64>> {
    check_len("x", lcp.dim(), x.as_slice())?;
    let l = lcp.dim();
    let shifted = lcp.m() - DMatrix::<f64>::identity(l, l);
    let lu = LuSolver::new("M - I", &shifted)?;
    Ok(lu.solve(&(x * 2.0 - lcp.q())))
}

/// Positive and negative parts: `z = max(x, 0)`, `w = max(-x, 0)`.
pub fn gave_solution_to_hlcp(x: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    (x.map(|v| v.max(0.0)), x.map(|v| (-v).max(0.0)))
}

/// `A = (C + D)/2`, `B = (D - C)/2`, `c = p`.
pub fn hlcp_to_gave(hlcp: &HlcpProblem) -> GaveProblem {
    GaveProblem::new(
        (hlcp.c() + hlcp.d()) * 0.5,
        (hlcp.d() - hlcp.c()) * 0.5,
        hlcp.p().clone(),
    )
    .expect("shapes and finiteness carried over from the HLCP")
}

/// `C = A - B`, `D = A + B`, `p = c`: the HLCP solved by the positive and
/// negative parts of a GAVE solution.
pub fn gave_to_hlcp(problem: &GaveProblem) -> HlcpProblem {
    HlcpProblem::new(
        problem.a() - problem.b(),
        problem.a() + problem.b(),
        problem.c().clone(),
    )
    .expect("shapes and finiteness carried over from the GAVE")
}

/// Checks `z ≥ 0`, `w = Mz + q ≥ 0` and `wᵀz = 0` to within `tol`; the
/// inner product is compared against `tol · max(1, ‖z‖‖w‖)`.
pub fn verify_lcp(lcp: &LcpProblem, z: &DVector<f64>, tol: f64) -> Result<ComplementarityReport> {
    check_positive("tol", tol)?;
    check_len("z", lcp.dim(), z.as_slice())?;
    let w = lcp.m() * z + lcp.q();
    let min_z = z.min();
    let min_w = w.min();
    let inner_product = z.dot(&w);
    let scale = (z.norm() * w.norm()).max(1.0);
    Ok(ComplementarityReport {
        min_z,
        min_w,
        inner_product,
        feasible: min_z >= -tol && min_w >= -tol,
        complementary: inner_product.abs() <= tol * scale,
    })
}
