use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use nalgebra::DVector;

use crate::dynamics::{self, field_from_residual, FlowParams};
use crate::error::{check_len, check_positive, GaveError, Result};
use crate::problem::{Certificate, GaveProblem};

/// Growth of the residual (relative to the start) treated as divergence.
const DIVERGENCE_FACTOR: f64 = 1e6;
const MAX_SAFEGUARD_HALVINGS: u32 = 60;

/// Settings for [`forward_euler_solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerConfig {
    /// Time step `η`.
    pub eta: f64,
    /// `ξ > 2`; fixes `λ₁ = 1 - 2/ξ`, `λ₂ = 1 + 2/ξ` for the step-count guarantee.
    pub xi: f64,
    pub max_iter: usize,
    /// Stop once `‖r(x)‖ ≤ tol`.
    pub tol: f64,
    /// Retry residual-increasing steps with a halved step. Not part of the
    /// plain iteration; runs that use it are flagged in the log.
    pub safeguard: bool,
}

impl Default for EulerConfig {
    fn default() -> Self {
        Self {
            eta: 0.1,
            xi: 4.0,
            max_iter: 1_000_000,
            tol: 1e-8,
            safeguard: false,
        }
    }
}

impl EulerConfig {
    pub fn validate(&self) -> Result<()> {
        check_positive("eta", self.eta)?;
        check_positive("tol", self.tol)?;
        dynamics::xi_exponents(self.xi)?;
        if self.max_iter == 0 {
            return Err(GaveError::InvalidParameter {
                name: "max_iter",
                reason: "must be positive".into(),
            });
        }
        Ok(())
    }

    /// `(λ₁, λ₂)` implied by `ξ`.
    pub fn lambdas(&self) -> Result<(f64, f64)> {
        dynamics::xi_exponents(self.xi)
    }
}

/// Iterates of the discrete scheme with their residual norms.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateLog {
    pub iterates: Vec<DVector<f64>>,
    pub residual_norms: Vec<f64>,
    pub steps_taken: usize,
    pub converged: bool,
    /// Set when the run used the step-halving safeguard.
    pub safeguarded: bool,
    pub step_halvings: usize,
}

impl IterateLog {
    pub fn last(&self) -> &DVector<f64> {
        self.iterates.last().expect("log holds the starting point")
    }

    pub fn final_residual(&self) -> f64 {
        *self.residual_norms.last().expect("log holds the starting point")
    }
}

pub(crate) fn euler_candidate(
    problem: &GaveProblem,
    params: &FlowParams,
    eta: f64,
    x: &DVector<f64>,
    r: &DVector<f64>,
) -> DVector<f64> {
    let mut next = field_from_residual(params, problem, r);
    next *= eta;
    next += x;
    next
}

/// Runs `x⁽ᵏ⁺¹⁾ = x⁽ᵏ⁾ - η ρ(x⁽ᵏ⁾) g(γ, x⁽ᵏ⁾)` from `x0`.
///
/// Stops when `‖r‖ ≤ config.tol` or after `config.max_iter` steps. Without
/// the safeguard, a residual that grows a millionfold (or overflows) is
/// reported as [`GaveError::Divergence`].
pub fn forward_euler_solve(
    problem: &GaveProblem,
    params: &FlowParams,
    config: &EulerConfig,
    x0: &DVector<f64>,
) -> Result<IterateLog> {
    config.validate()?;
    check_len("x0", problem.dim(), x0.as_slice())?;

    let mut x = x0.clone();
    let mut r = problem.residual_unchecked(&x);
    let mut rn = r.norm();
    let r0 = rn;
    let mut log = IterateLog {
        iterates: vec![x.clone()],
        residual_norms: vec![rn],
        steps_taken: 0,
        converged: false,
        safeguarded: config.safeguard,
        step_halvings: 0,
    };
    let mut scale = 1.0;

    for step in 1..=config.max_iter {
        if rn <= config.tol {
            break;
        }
        if rn <= problem.zero_threshold() {
            // Field vanishes: the iteration is stationary.
            break;
        }
        let mut cand = euler_candidate(problem, params, config.eta * scale, &x, &r);
        let mut rc_vec = problem.residual_unchecked(&cand);
        let mut rc = rc_vec.norm();

        if config.safeguard {
            let mut halvings = 0;
            while !(rc < rn) {
                if halvings == MAX_SAFEGUARD_HALVINGS {
                    log.steps_taken = log.iterates.len() - 1;
                    log.converged = rn <= config.tol;
                    return Ok(log);
                }
                scale *= 0.5;
                halvings += 1;
                log.step_halvings += 1;
                cand = euler_candidate(problem, params, config.eta * scale, &x, &r);
                rc_vec = problem.residual_unchecked(&cand);
                rc = rc_vec.norm();
            }
        } else if !rc.is_finite() || (rc > DIVERGENCE_FACTOR * r0 && rc > problem.zero_threshold()) {
            return Err(GaveError::Divergence { step, residual: rc });
        }

        x = cand;
        r = rc_vec;
        rn = rc;
        log.iterates.push(x.clone());
        log.residual_norms.push(rn);
    }

    log.steps_taken = log.iterates.len() - 1;
    log.converged = rn <= config.tol;
    Ok(log)
}

/// `(c₁, c₂)` for the exponents implied by `ξ`.
fn xi_constants(xi: f64, params: &FlowParams, cert: &Certificate) -> Result<(f64, f64)> {
    let tied = params.with_xi(xi)?;
    let bound = dynamics::settling_time_bound(&tied, cert)?;
    Ok((bound.c1, bound.c2))
}

/// `T̂ = πξ / (2√(c₁c₂))`, after which the continuous envelope is zero.
pub fn settle_horizon(xi: f64, params: &FlowParams, cert: &Certificate) -> Result<f64> {
    let (c1, c2) = xi_constants(xi, params, cert)?;
    Ok(PI * xi / (2.0 * (c1 * c2).sqrt()))
}

/// Number of Euler steps `k★ = ⌈πξ / (2η√(c₁c₂))⌉` covering `T̂`.
pub fn fixed_step_count(config: &EulerConfig, params: &FlowParams, cert: &Certificate) -> Result<u64> {
    check_positive("eta", config.eta)?;
    let (c1, c2) = xi_constants(config.xi, params, cert)?;
    let raw = PI * config.xi / (2.0 * config.eta * (c1 * c2).sqrt());
    // Quotients that are integers in exact arithmetic may land one ulp above.
    let nearest = raw.round();
    let steps = if (raw - nearest).abs() <= 1e-12 * nearest.max(1.0) {
        nearest
    } else {
        raw.ceil()
    };
    Ok(steps.max(1.0) as u64)
}

/// Initial-condition-free bound on `‖x(t) - x★‖` along the continuous flow:
/// `√2 (√(c₁/c₂) tan(π/2 - √(c₁c₂) t/ξ))^(ξ/2)` before `T̂`, zero after.
///
/// Returns `+∞` at `t = 0` and for an uncertified problem, where no finite
/// bound is available.
pub fn continuous_envelope(config: &EulerConfig, params: &FlowParams, cert: &Certificate, t: f64) -> f64 {
    let Ok((c1, c2)) = xi_constants(config.xi, params, cert) else {
        return f64::INFINITY;
    };
    if t <= 0.0 {
        return f64::INFINITY;
    }
    let rate = (c1 * c2).sqrt() / config.xi;
    if t >= FRAC_PI_2 / rate {
        return 0.0;
    }
    let angle = FRAC_PI_2 - rate * t;
    SQRT_2 * ((c1 / c2).sqrt() * angle.tan()).powf(config.xi / 2.0)
}
