use nalgebra::DVector;

use super::euler::{continuous_envelope, euler_candidate, fixed_step_count, EulerConfig};
use crate::dynamics::FlowParams;
use crate::error::{check_len, check_positive, GaveError, Result};
use crate::problem::{certify, Certificate, GaveProblem};

pub const MAX_HALVINGS: u32 = 40;

/// Trials whose `k★` exceeds this are not attempted.
const MAX_TRIAL_STEPS: u64 = 20_000_000;

/// Largest `η = eta0 · 2⁻ʲ` (`0 ≤ j ≤ 40`) for which the Euler run from `x0`
/// stays under the continuous envelope plus `eps` up to `k★` and within
/// `eps` of the solution afterwards.
///
/// The run uses the exponents implied by `xi` together with the gains of
/// `params`. The distance to the solution is bounded from above by
/// `‖r(x)‖ / (σ_min(A) - ‖B‖)`, so an accepted `η` satisfies the property
/// for the true error as well. The tail after `k★` is checked for another
/// `k★` steps.
pub fn find_step(
    problem: &GaveProblem,
    params: &FlowParams,
    xi: f64,
    eps: f64,
    eta0: f64,
    x0: &DVector<f64>,
) -> Result<f64> {
    check_positive("eps", eps)?;
    check_positive("eta0", eta0)?;
    check_len("x0", problem.dim(), x0.as_slice())?;
    let tied = params.with_xi(xi)?;
    let cert = certify(problem);
    cert.require_certified()?;

    for j in 0..=MAX_HALVINGS {
        let eta = eta0 * 0.5f64.powi(j as i32);
        let config = EulerConfig {
            eta,
            xi,
            ..EulerConfig::default()
        };
        let k_star = fixed_step_count(&config, &tied, &cert)?;
        if k_star > MAX_TRIAL_STEPS {
            break;
        }
        if satisfies_envelope(problem, &tied, &cert, &config, k_star, eps, x0) {
            return Ok(eta);
        }
    }
    Err(GaveError::NoStepFound { halvings: MAX_HALVINGS })
}

fn satisfies_envelope(
    problem: &GaveProblem,
    params: &FlowParams,
    cert: &Certificate,
    config: &EulerConfig,
    k_star: u64,
    eps: f64,
    x0: &DVector<f64>,
) -> bool {
    let mut x = x0.clone();
    let mut r = problem.residual_unchecked(&x);
    for k in 0..=2 * k_star {
        let rn = r.norm();
        let err_bound = rn / cert.gap;
        let allowed = if k <= k_star {
            continuous_envelope(config, params, cert, config.eta * k as f64) + eps
        } else {
            eps
        };
        if !(err_bound <= allowed) {
            return false;
        }
        if rn <= problem.zero_threshold() {
            // Stationary from here on, and already within eps.
            return err_bound <= eps;
        }
        x = euler_candidate(problem, params, config.eta, &x, &r);
        r = problem.residual_unchecked(&x);
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::euler::forward_euler_solve;

    fn scalar() -> GaveProblem {
        GaveProblem::from_row_slices(1, &[2.0], &[1.0], &[1.0]).unwrap()
    }

    fn recheck(eta: f64, eps: f64, x0: f64) -> bool {
        let prob = scalar();
        let p = FlowParams::default();
        let cert = certify(&prob);
        let cfg = EulerConfig {
            eta,
            max_iter: 1,
            ..EulerConfig::default()
        };
        let k_star = fixed_step_count(&cfg, &p, &cert).unwrap() as usize;
        let cfg = EulerConfig {
            max_iter: 2 * k_star,
            tol: f64::MIN_POSITIVE,
            ..cfg
        };
        let log = forward_euler_solve(&prob, &p, &cfg, &DVector::from_element(1, x0)).unwrap();
        log.iterates.iter().enumerate().all(|(k, x)| {
            let err = (x[0] - 1.0).abs();
            if k <= k_star {
                err <= continuous_envelope(&cfg, &p, &cert, eta * k as f64) + eps
            } else {
                err <= eps
            }
        })
    }

    #[test]
    fn scalar_search_returns_valid_step() {
        let eta = find_step(&scalar(), &FlowParams::default(), 4.0, 1e-2, 1.0, &DVector::from_element(1, 0.0)).unwrap();
        assert!(eta > 0.0 && eta <= 1.0);
        assert!(recheck(eta, 1e-2, 0.0));
    }

    #[test]
    fn accepted_start_is_returned_unchanged() {
        let x0 = DVector::from_element(1, 0.0);
        let eta = find_step(&scalar(), &FlowParams::default(), 4.0, 1e-2, 1.0, &x0).unwrap();
        let again = find_step(&scalar(), &FlowParams::default(), 4.0, 1e-2, eta, &x0).unwrap();
        assert_eq!(again, eta);
    }

    #[test]
    fn absurd_start_is_reduced() {
        let x0 = DVector::from_element(1, 0.0);
        let eta = find_step(&scalar(), &FlowParams::default(), 4.0, 1e-2, 1e6, &x0).unwrap();
        assert!(eta < 1e6);
        assert!(recheck(eta, 1e-2, 0.0));
    }

    #[test]
    fn uncertified_problem_is_rejected() {
        let prob = GaveProblem::from_row_slices(1, &[1.0], &[1.0], &[1.0]).unwrap();
        assert!(matches!(
            find_step(&prob, &FlowParams::default(), 4.0, 1e-2, 1.0, &DVector::from_element(1, 0.0)),
            Err(GaveError::Uncertified { .. })
        ));
    }
}
