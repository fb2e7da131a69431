use super::euler::IterateLog;
use super::reference::Trajectory;
use crate::error::{check_positive, GaveError, Result};

/// Uniform-grid `(T, ε)`-closeness: every iterate `x⁽ᵏ⁾` with `ηk ≤ horizon`
/// lies within `eps` of the trajectory at time `ηk`.
///
/// Trajectory states between samples are linearly interpolated. A log that
/// converged before the horizon is held at its last iterate.
pub fn closeness_check(traj: &Trajectory, log: &IterateLog, eta: f64, horizon: f64, eps: f64) -> Result<bool> {
    check_positive("eta", eta)?;
    check_positive("eps", eps)?;
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(GaveError::InvalidParameter {
            name: "horizon",
            reason: format!("must be finite and nonnegative, got {horizon}"),
        });
    }
    let covered = traj.end_time();
    if covered < horizon {
        return Err(GaveError::TrajectoryTooShort { covered, horizon });
    }

    let mut k = 0usize;
    loop {
        let t = eta * k as f64;
        if t > horizon {
            return Ok(true);
        }
        let iterate = match log.iterates.get(k) {
            Some(x) => x,
            None if log.converged => log.last(),
            None => return Err(GaveError::LogTooShort { steps: log.steps_taken }),
        };
        let continuous = traj.state_at(t).expect("t lies within the trajectory");
        if (iterate - continuous).norm() > eps {
            return Ok(false);
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn traj() -> Trajectory {
        let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
        let states = times.iter().map(|t| DVector::from_vec(vec![(-t).exp(), t * t])).collect();
        Trajectory {
            residual_norms: vec![0.0; times.len()],
            steps: times.len() - 1,
            stalled: false,
            times,
            states,
        }
    }

    fn log_from(traj: &Trajectory, eta: f64, shift: f64) -> IterateLog {
        let iterates: Vec<DVector<f64>> = (0..=10)
            .map(|k| traj.state_at(eta * k as f64).unwrap().add_scalar(shift))
            .collect();
        IterateLog {
            residual_norms: vec![0.0; iterates.len()],
            steps_taken: iterates.len() - 1,
            iterates,
            converged: false,
            safeguarded: false,
            step_halvings: 0,
        }
    }

    #[test]
    fn exact_samples_are_close() {
        let tr = traj();
        let log = log_from(&tr, 0.1, 0.0);
        assert!(closeness_check(&tr, &log, 0.1, 1.0, 1e-14).unwrap());
    }

    #[test]
    fn shifted_samples_are_not_close() {
        let tr = traj();
        let eps = 0.01;
        // A uniform shift s in both coordinates moves each iterate by s·√2.
        let log = log_from(&tr, 0.1, 2.0 * eps / 2f64.sqrt());
        assert!(!closeness_check(&tr, &log, 0.1, 1.0, eps).unwrap());
    }

    #[test]
    fn short_trajectory_is_an_error() {
        let tr = traj();
        let log = log_from(&tr, 0.1, 0.0);
        assert!(matches!(
            closeness_check(&tr, &log, 0.1, 2.0, 0.1),
            Err(GaveError::TrajectoryTooShort { .. })
        ));
    }

    #[test]
    fn short_unconverged_log_is_an_error() {
        let tr = traj();
        let log = log_from(&tr, 0.05, 0.0);
        assert!(matches!(
            closeness_check(&tr, &log, 0.05, 1.0, 0.1),
            Err(GaveError::LogTooShort { .. })
        ));
    }
}
