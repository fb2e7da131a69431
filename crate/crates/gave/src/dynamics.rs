//! The fixed-time, inverse-free flow and its settling-time bounds.
//!
//! The state evolves as `ẋ = -ρ(x) · γ Aᵀ r(x)` where
//! `ρ(x) = ρ₁ ‖r(x)‖^(λ₁-1) + ρ₂ ‖r(x)‖^(λ₂-1)` away from the solution and
//! `ρ = 0` on it. With `λ₁ ∈ (0, 1)` and `λ₂ > 1` every trajectory reaches the
//! unique solution before `T_max`, whatever the starting point.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, check_positive, GaveError, Result};
use crate::linalg::{self, LuSolver};
use crate::problem::{Certificate, GaveProblem};

/// Tuning constants `γ, ρ₁, ρ₂, λ₁, λ₂` of the flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowParams {
    gamma: f64,
    rho1: f64,
    rho2: f64,
    lambda1: f64,
    lambda2: f64,
}

impl FlowParams {
    pub fn new(gamma: f64, rho1: f64, rho2: f64, lambda1: f64, lambda2: f64) -> Result<Self> {
        check_positive("gamma", gamma)?;
        check_positive("rho1", rho1)?;
        check_positive("rho2", rho2)?;
        if !(lambda1 > 0.0 && lambda1 < 1.0) {
            return Err(GaveError::InvalidParameter {
                name: "lambda1",
                reason: format!("must lie in (0, 1), got {lambda1}"),
            });
        }
        if !(lambda2 > 1.0 && lambda2.is_finite()) {
            return Err(GaveError::InvalidParameter {
                name: "lambda2",
                reason: format!("must be finite and greater than 1, got {lambda2}"),
            });
        }
        Ok(Self {
            gamma,
            rho1,
            rho2,
            lambda1,
            lambda2,
        })
    }

    /// Exponents tied to `ξ > 2` by `λ₁ = 1 - 2/ξ`, `λ₂ = 1 + 2/ξ`.
    pub fn from_xi(gamma: f64, rho1: f64, rho2: f64, xi: f64) -> Result<Self> {
        let (lambda1, lambda2) = xi_exponents(xi)?;
        Self::new(gamma, rho1, rho2, lambda1, lambda2)
    }

    /// Same gains, exponents replaced by the `ξ` form.
    pub fn with_xi(&self, xi: f64) -> Result<Self> {
        Self::from_xi(self.gamma, self.rho1, self.rho2, xi)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    pub fn rho2(&self) -> f64 {
        self.rho2
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    /// `ρ₁ = ρ₂ = γ = 1`, `ξ = 4` (so `λ₁ = 0.5`, `λ₂ = 1.5`).
    pub fn default_xi() -> Self {
        Self::from_xi(1.0, 1.0, 1.0, 4.0).expect("default parameters are valid")
    }
}

impl Default for FlowParams {
    fn default() -> Self {
        Self::default_xi()
    }
}

pub(crate) fn xi_exponents(xi: f64) -> Result<(f64, f64)> {
    if !(xi > 2.0 && xi.is_finite()) {
        return Err(GaveError::InvalidParameter {
            name: "xi",
            reason: format!("must be finite and greater than 2, got {xi}"),
        });
    }
    Ok((1.0 - 2.0 / xi, 1.0 + 2.0 / xi))
}

/// Time-varying gain `ρ` as a function of the residual norm.
pub fn rho(params: &FlowParams, r_norm: f64) -> f64 {
    if r_norm <= 0.0 {
        return 0.0;
    }
    params.rho1 * r_norm.powf(params.lambda1 - 1.0) + params.rho2 * r_norm.powf(params.lambda2 - 1.0)
}

/// Right-hand side `-ρ(x) γ Aᵀ r(x)` of the flow.
pub fn flow_field(params: &FlowParams, problem: &GaveProblem, x: &DVector<f64>) -> Result<DVector<f64>> {
    check_len("x", problem.dim(), x.as_slice())?;
    let r = problem.residual_unchecked(x);
    Ok(field_from_residual(params, problem, &r))
}

pub(crate) fn field_from_residual(params: &FlowParams, problem: &GaveProblem, r: &DVector<f64>) -> DVector<f64> {
    let rn = r.norm();
    let mut out = DVector::zeros(r.len());
    if rn <= problem.zero_threshold() {
        return out;
    }
    out.gemv_tr(-rho(params, rn) * params.gamma, problem.a(), r, 0.0);
    out
}

/// Lipschitz constant `γ (‖AᵀA‖ + ‖AᵀB‖)` of `g(γ, x) = γ Aᵀ r(x)`.
pub fn lipschitz_constant(params: &FlowParams, problem: &GaveProblem) -> f64 {
    let at = problem.a().transpose();
    let ata = &at * problem.a();
    let atb = &at * problem.b();
    let norm = |m: &DMatrix<f64>| linalg::extreme_singular_values(m).1;
    params.gamma * (norm(&ata) + norm(&atb))
}

/// Constants of the fixed-time estimate `V̇ ≤ -c₁ V^κ₁ - c₂ V^κ₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SettlingBound {
    pub c1: f64,
    pub c2: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub t_max: f64,
}

impl SettlingBound {
    fn from_constants(params: &FlowParams, c1: f64, c2: f64) -> Self {
        let kappa1 = (params.lambda1 + 1.0) / 2.0;
        let kappa2 = (params.lambda2 + 1.0) / 2.0;
        let t_max = 1.0 / (c1 * (1.0 - kappa1)) + 1.0 / (c2 * (kappa2 - 1.0));
        Self {
            c1,
            c2,
            kappa1,
            kappa2,
            t_max,
        }
    }
}

/// Upper bound on the settling time from the certificate gap.
pub fn settling_time_bound(params: &FlowParams, cert: &Certificate) -> Result<SettlingBound> {
    cert.require_certified()?;
    let gap = cert.gap;
    let (l1, l2) = (params.lambda1, params.lambda2);
    let c1 = 2f64.powf((l1 - 1.0) / 2.0) * params.gamma * params.rho1 * gap.powf(l1 + 1.0);
    let c2 = 2f64.powf((l2 - 1.0) / 2.0) * params.gamma * params.rho2 * gap.powf(l2 + 1.0);
    Ok(SettlingBound::from_constants(params, c1, c2))
}

/// The earlier settling-time bound for `B = I`, built from `‖A⁻¹‖`, `‖A+I‖`
/// and `‖A-I‖`. Kept for comparison with [`settling_time_bound`].
pub fn settling_time_bound_lyyhc(params: &FlowParams, a: &DMatrix<f64>) -> Result<SettlingBound> {
    let n = linalg::ensure_square("A", a)?;
    linalg::ensure_finite("A", a.as_slice())?;
    let sigma_min = linalg::extreme_singular_values(a).0;
    let norm_a = linalg::extreme_singular_values(a).1;
    if sigma_min <= f64::EPSILON * norm_a.max(1.0) * n as f64 {
        return Err(GaveError::Singular("A"));
    }
    if sigma_min <= 1.0 {
        return Err(GaveError::NotAveRegime { sigma_min });
    }
    let identity = DMatrix::<f64>::identity(n, n);
    let inv_norm = 1.0 / sigma_min;
    let spread = linalg::extreme_singular_values(&(a + &identity)).1 + linalg::extreme_singular_values(&(a - &identity)).1;
    let base = 1.0 / (inv_norm * inv_norm) - 1.0;
    let (l1, l2) = (params.lambda1, params.lambda2);
    let c1 = 2f64.powf((l1 - 1.0) / 2.0) * params.gamma * params.rho1 * base.powi(2) / spread.powf(3.0 - l1);
    let c2 = 2f64.powf((l2 - 1.0) / 2.0) * params.gamma * params.rho2 * base.powf(l2 + 1.0) / spread.powf(l2 + 1.0);
    Ok(SettlingBound::from_constants(params, c1, c2))
}

/// `V(x) = ½‖x - x★‖²`.
pub fn lyapunov(x: &DVector<f64>, x_star: &DVector<f64>) -> Result<f64> {
    check_len("x", x_star.len(), x.as_slice())?;
    Ok(0.5 * (x - x_star).norm_squared())
}

/// The inverse-based neural flow `ż = ½ρ(|A⁻¹(Bz + c)| - z)` with output
/// `x = A⁻¹(Bz + c)`. `A` is factored once; nothing forms `A⁻¹`.
#[derive(Debug, Clone)]
pub struct GaoWangFlow {
    lu: LuSolver,
    b: DMatrix<f64>,
    c: DVector<f64>,
    rho_scale: f64,
}

impl GaoWangFlow {
    pub fn new(problem: &GaveProblem, rho_scale: f64) -> Result<Self> {
        check_positive("rho_scale", rho_scale)?;
        Ok(Self {
            lu: LuSolver::new("A", problem.a())?,
            b: problem.b().clone(),
            c: problem.c().clone(),
            rho_scale,
        })
    }

    pub fn rho_scale(&self) -> f64 {
        self.rho_scale
    }

    /// `x = A⁻¹(Bz + c)`.
    pub fn output(&self, z: &DVector<f64>) -> Result<DVector<f64>> {
        check_len("z", self.c.len(), z.as_slice())?;
        Ok(self.output_unchecked(z))
    }

    fn output_unchecked(&self, z: &DVector<f64>) -> DVector<f64> {
        let mut rhs = self.c.clone();
        rhs.gemv(1.0, &self.b, z, 1.0);
        self.lu.solve(&rhs)
    }

    pub fn field(&self, z: &DVector<f64>) -> Result<DVector<f64>> {
        check_len("z", self.c.len(), z.as_slice())?;
        Ok(self.field_unchecked(z))
    }

    pub(crate) fn field_unchecked(&self, z: &DVector<f64>) -> DVector<f64> {
        (linalg::abs(&self.output_unchecked(z)) - z) * (0.5 * self.rho_scale)
    }
}

/// One evaluation of the baseline flow: `(ż, x)`.
pub fn baseline_gw_field(
    problem: &GaveProblem,
    rho_scale: f64,
    z: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let flow = GaoWangFlow::new(problem, rho_scale)?;
    Ok((flow.field(z)?, flow.output(z)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::certify;
    use approx::assert_relative_eq;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    fn scalar(a: f64, b: f64, c: f64) -> GaveProblem {
        GaveProblem::from_row_slices(1, &[a], &[b], &[c]).unwrap()
    }

    fn unit_gains(l1: f64, l2: f64) -> FlowParams {
        FlowParams::new(1.0, 1.0, 1.0, l1, l2).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(FlowParams::new(0.0, 1.0, 1.0, 0.5, 2.0).is_err());
        assert!(FlowParams::new(1.0, 1.0, 1.0, 1.0, 2.0).is_err());
        assert!(FlowParams::new(1.0, 1.0, 1.0, 0.5, 1.0).is_err());
        assert!(FlowParams::from_xi(1.0, 1.0, 1.0, 2.0).is_err());
        let p = FlowParams::default();
        assert_eq!((p.lambda1(), p.lambda2()), (0.5, 1.5));
    }

    #[test]
    fn rho_examples() {
        let p = unit_gains(0.5, 2.0);
        assert_eq!(rho(&p, 1.0), 2.0);
        assert_eq!(rho(&p, 4.0), 4.5);
        assert_eq!(rho(&p, 0.0), 0.0);
    }

    #[test]
    fn flow_field_examples() {
        let p = unit_gains(0.5, 2.0);
        let prob = scalar(2.0, 1.0, 1.0);
        assert_eq!(flow_field(&p, &prob, &v(&[1.0])).unwrap()[0], 0.0);
        assert_relative_eq!(flow_field(&p, &prob, &v(&[0.0])).unwrap()[0], 4.0, max_relative = 1e-15);
        assert_relative_eq!(flow_field(&p, &prob, &v(&[2.0])).unwrap()[0], -4.0, max_relative = 1e-15);
        assert!(flow_field(&p, &prob, &v(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn lipschitz_examples() {
        let prob = scalar(2.0, 1.0, 0.0);
        let g1 = FlowParams::new(1.0, 1.0, 1.0, 0.5, 2.0).unwrap();
        let g2 = FlowParams::new(2.0, 1.0, 1.0, 0.5, 2.0).unwrap();
        assert_relative_eq!(lipschitz_constant(&g1, &prob), 6.0, max_relative = 1e-15);
        assert_relative_eq!(lipschitz_constant(&g2, &prob), 12.0, max_relative = 1e-15);
        let lin = GaveProblem::new(DMatrix::identity(3, 3), DMatrix::zeros(3, 3), DVector::zeros(3)).unwrap();
        assert_relative_eq!(lipschitz_constant(&g1, &lin), 1.0, max_relative = 1e-15);
    }

    // Expected values were recomputed with 30-digit arithmetic, independently of this code.
    #[test]
    fn settling_bound_examples() {
        let p = unit_gains(0.5, 3.0);
        let gap_one = certify(&scalar(2.0, 1.0, 0.0));
        let b = settling_time_bound(&p, &gap_one).unwrap();
        assert_relative_eq!(b.c1, 0.840_896_415_253_714_5, max_relative = 1e-14);
        assert_relative_eq!(b.c2, 2.0, max_relative = 1e-14);
        assert_eq!((b.kappa1, b.kappa2), (0.75, 2.0));
        assert_relative_eq!(b.t_max, 5.256_828_460_010_884, max_relative = 1e-13);

        let doubled = FlowParams::new(2.0, 1.0, 1.0, 0.5, 3.0).unwrap();
        assert_relative_eq!(settling_time_bound(&doubled, &gap_one).unwrap().t_max, 2.628_414_230_005_442, max_relative = 1e-13);

        let gap_two = certify(&scalar(3.0, 1.0, 0.0));
        let b = settling_time_bound(&p, &gap_two).unwrap();
        assert_relative_eq!(b.c1, 2.378_414_230_005_442, max_relative = 1e-13);
        assert_relative_eq!(b.c2, 32.0, max_relative = 1e-13);
        assert_relative_eq!(b.t_max, 1.713_042_830_507_429, max_relative = 1e-13);
    }

    #[test]
    fn settling_bound_needs_certificate() {
        let cert = certify(&scalar(1.0, 1.0, 0.0));
        assert!(matches!(
            settling_time_bound(&FlowParams::default(), &cert),
            Err(GaveError::Uncertified { .. })
        ));
    }

    #[test]
    fn lyyhc_examples() {
        let p = unit_gains(0.5, 3.0);
        let a = DMatrix::identity(3, 3) * 2.0;
        let old = settling_time_bound_lyyhc(&p, &a).unwrap();
        assert_relative_eq!(old.c1, 0.236_502_116_790_107_2, max_relative = 1e-13);
        assert_relative_eq!(old.c2, 0.632_812_5, max_relative = 1e-13);
        assert_relative_eq!(old.t_max, 18.493_414_771_396_724, max_relative = 1e-13);

        let prob = GaveProblem::new(a.clone(), DMatrix::identity(3, 3), DVector::zeros(3)).unwrap();
        let new = settling_time_bound(&p, &certify(&prob)).unwrap();
        assert!(new.t_max < old.t_max);

        let p2 = FlowParams::new(2.0, 1.0, 1.0, 0.5, 3.0).unwrap();
        let old2 = settling_time_bound_lyyhc(&p2, &a).unwrap();
        let new2 = settling_time_bound(&p2, &certify(&prob)).unwrap();
        assert_relative_eq!(old2.t_max, old.t_max / 2.0, max_relative = 1e-14);
        assert_relative_eq!(new2.t_max, new.t_max / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn lyyhc_rejects_outside_regime() {
        let p = FlowParams::default();
        assert!(matches!(
            settling_time_bound_lyyhc(&p, &(DMatrix::identity(2, 2) * 0.9)),
            Err(GaveError::NotAveRegime { .. })
        ));
        assert!(matches!(
            settling_time_bound_lyyhc(&p, &DMatrix::zeros(2, 2)),
            Err(GaveError::Singular("A"))
        ));
    }

    #[test]
    fn lyapunov_examples() {
        assert_eq!(lyapunov(&v(&[3.0, -1.0]), &v(&[3.0, -1.0])).unwrap(), 0.0);
        assert_eq!(lyapunov(&v(&[0.0]), &v(&[1.0])).unwrap(), 0.5);
        assert_eq!(lyapunov(&v(&[1.0, 1.0]), &v(&[0.0, 0.0])).unwrap(), 1.0);
        assert!(lyapunov(&v(&[1.0]), &v(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn baseline_examples() {
        let prob = scalar(2.0, 1.0, 1.0);
        let (dz, x) = baseline_gw_field(&prob, 1.0, &v(&[1.0])).unwrap();
        assert_eq!((dz[0], x[0]), (0.0, 1.0));
        let (dz, _) = baseline_gw_field(&prob, 1.0, &v(&[0.0])).unwrap();
        assert_eq!(dz[0], 0.25);

        let decay = GaveProblem::new(DMatrix::identity(2, 2) * 3.0, DMatrix::zeros(2, 2), DVector::zeros(2)).unwrap();
        let (dz, _) = baseline_gw_field(&decay, 2.0, &v(&[0.5, -4.0])).unwrap();
        assert_eq!(dz, v(&[-0.5, 4.0]));
    }

    #[test]
    fn baseline_rejects_singular_a() {
        let prob = GaveProblem::from_row_slices(2, &[1.0, 2.0, 2.0, 4.0], &[0.0; 4], &[1.0, 1.0]).unwrap();
        assert!(matches!(GaoWangFlow::new(&prob, 1.0), Err(GaveError::Singular("A"))));
    }
}
