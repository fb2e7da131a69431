//! Seeded generators for certified test problems.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)`, and draws are
//! taken in a fixed order, so a seed determines its instance bit for bit:
//!
//! 1. two `n×n` standard-normal matrices, row-major, each turned into an
//!    orthogonal factor by QR with the signs of `diag(R)` folded into `Q`;
//! 2. `n` singular values, uniform in `[1 + gap, 2 + gap]`;
//! 3. an `n×n` standard-normal `B`, row-major, scaled to unit spectral norm
//!    (skipped when `B = I`);
//! 4. `x★`, uniform in `[-scale, scale]ⁿ`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{check_positive, GaveError, Result};
use crate::linalg;
use crate::problem::GaveProblem;
use crate::reformulations::LcpProblem;

/// Parameters of a generated GAVE instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub n: usize,
    /// Requested lower bound on `σ_min(A) - ‖B‖`.
    pub gap: f64,
    /// Entries of `x★` lie in `[-scale, scale]`.
    pub scale: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(n: usize, gap: f64, scale: f64, seed: u64) -> Result<Self> {
        let spec = Self { n, gap, scale, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(GaveError::InvalidParameter {
                name: "n",
                reason: "dimension must be positive".into(),
            });
        }
        check_positive("gap", self.gap)?;
        check_positive("scale", self.scale)
    }
}

fn gaussian_matrix(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let entries: Vec<f64> = (0..n * n).map(|_| rng.sample(StandardNormal)).collect();
    DMatrix::from_row_slice(n, n, &entries)
}

fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let qr = gaussian_matrix(n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn generate(spec: &GeneratorSpec, identity_b: bool) -> Result<(GaveProblem, DVector<f64>)> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let left = random_orthogonal(n, &mut rng);
    let right = random_orthogonal(n, &mut rng);
    let sigma: Vec<f64> = (0..n)
        .map(|_| rng.random_range(1.0 + spec.gap..=2.0 + spec.gap))
        .collect();
    let a = &left * DMatrix::from_diagonal(&DVector::from_vec(sigma)) * right.transpose();

    let b = if identity_b {
        DMatrix::identity(n, n)
    } else {
        let g = gaussian_matrix(n, &mut rng);
        let norm = linalg::extreme_singular_values(&g).1;
        g / norm
    };

    let x_star = DVector::from_iterator(n, (0..n).map(|_| rng.random_range(-spec.scale..=spec.scale)));
    let mut c = &a * &x_star;
    c.gemv(-1.0, &b, &linalg::abs(&x_star), 1.0);
    Ok((GaveProblem::new(a, b, c)?, x_star))
}

/// A GAVE instance with `σ_min(A) - ‖B‖ ≥ spec.gap` and its embedded solution.
pub fn random_solvable_gave(spec: &GeneratorSpec) -> Result<(GaveProblem, DVector<f64>)> {
    generate(spec, false)
}

/// Same construction with `B = I`, so `σ_min(A) ≥ 1 + spec.gap`.
pub fn random_solvable_ave(spec: &GeneratorSpec) -> Result<(GaveProblem, DVector<f64>)> {
    generate(spec, true)
}

/// Symmetric `M = Q diag(μ) Qᵀ` with `μ ∈ [0.5, 2]` and `q ∈ [-1, 1]^l`.
///
/// `σ_min(M + I) = μ_min + 1 ≥ 1.5` and `‖M - I‖ = max|μᵢ - 1| ≤ 1`, so the
/// GAVE obtained from this LCP always has gap at least `0.5`.
pub fn random_spd_lcp(l: usize, seed: u64) -> Result<LcpProblem> {
    if l == 0 {
        return Err(GaveError::InvalidParameter {
            name: "l",
            reason: "dimension must be positive".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = random_orthogonal(l, &mut rng);
    let mu: Vec<f64> = (0..l).map(|_| rng.random_range(0.5..=2.0)).collect();
    let m = &q * DMatrix::from_diagonal(&DVector::from_vec(mu)) * q.transpose();
    let m = (&m + m.transpose()) * 0.5;
    let rhs = DVector::from_iterator(l, (0..l).map(|_| rng.random_range(-1.0..=1.0)));
    LcpProblem::new(m, rhs)
}
