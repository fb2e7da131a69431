use nalgebra::DVector;

use crate::dynamics::{field_from_residual, lipschitz_constant, lyapunov, rho, FlowParams};

const STIFFNESS_FRACTION: f64 = 0.25;
const MIN_STEP_FRACTION: f64 = 1e-12;
/// Residuals within this multiple of the rounding floor count as converged
/// when no step size decreases them.
const STALL_BAND: f64 = 16.0;
use crate::error::{check_len, check_positive, GaveError, Result};
use crate::problem::GaveProblem;

/// Time-stamped samples of a continuous trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub residual_norms: Vec<f64>,
    /// Accepted integration steps (excludes the hold sample appended after
    /// early convergence).
    pub steps: usize,
    /// No step size could decrease the residual, which was already within
    /// a small multiple of its rounding floor, so the last state was held.
    pub stalled: bool,
}

impl Trajectory {
    pub(crate) fn start(x: DVector<f64>, rn: f64) -> Self {
        Self {
            times: vec![0.0],
            states: vec![x],
            residual_norms: vec![rn],
            steps: 0,
            stalled: false,
        }
    }

    pub(crate) fn push(&mut self, t: f64, x: DVector<f64>, rn: f64) {
        self.times.push(t);
        self.states.push(x);
        self.residual_norms.push(rn);
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("trajectory holds the initial sample")
    }

    pub fn last(&self) -> &DVector<f64> {
        self.states.last().expect("trajectory holds the initial sample")
    }

    pub fn final_residual(&self) -> f64 {
        *self.residual_norms.last().expect("trajectory holds the initial sample")
    }

    /// State at time `t` by linear interpolation between samples.
    pub fn state_at(&self, t: f64) -> Option<DVector<f64>> {
        if !(t >= 0.0) || t > self.end_time() {
            return None;
        }
        let idx = self.times.partition_point(|s| *s <= t);
        if idx == self.times.len() {
            return Some(self.last().clone());
        }
        let (t0, t1) = (self.times[idx - 1], self.times[idx]);
        let w = (t - t0) / (t1 - t0);
        Some(&self.states[idx - 1] * (1.0 - w) + &self.states[idx] * w)
    }
}

/// Classical RK4 on the flow with residual-guarded step halving.
///
/// Each step is at most `h` and at most `1 / (4 ρ(x) L)`, where `L` is the
/// Lipschitz constant of `γAᵀr`; the field is `ρ(x)` times that map, so this
/// keeps RK4 well inside its accuracy region both far from the solution
/// (large `ρ₂‖r‖^(λ₂-1)`) and close to it (large `ρ₁‖r‖^(λ₁-1)`).
///
/// A step is rejected and retried with half the step size whenever it fails
/// to decrease `‖r‖`. With an anchor `x★`, the step must also not increase
/// `V(x) = ½‖x - x★‖²`. After an accepted step the step size doubles back
/// towards its cap. Integration stops once `‖r‖ ≤ stop_tol` (default
/// `1e-12 · max(1, ‖c‖)`), once `‖r‖` reaches its rounding floor, or when
/// no step size decreases `‖r‖` near that floor (see
/// [`Trajectory::stalled`]); the final state is then held until `t_end`.
/// Halving below `1e-12` of the step cap anywhere else is reported as
/// [`GaveError::StepUnderflow`].
#[derive(Debug, Clone)]
pub struct ReferenceFlow<'a> {
    problem: &'a GaveProblem,
    params: &'a FlowParams,
    h: f64,
    t_end: f64,
    anchor: Option<&'a DVector<f64>>,
    stop_tol: Option<f64>,
}

impl<'a> ReferenceFlow<'a> {
    pub fn new(problem: &'a GaveProblem, params: &'a FlowParams, h: f64, t_end: f64) -> Self {
        Self {
            problem,
            params,
            h,
            t_end,
            anchor: None,
            stop_tol: None,
        }
    }

    /// Also guard each step with the Lyapunov value around `x_star`.
    pub fn anchor(mut self, x_star: &'a DVector<f64>) -> Self {
        self.anchor = Some(x_star);
        self
    }

    /// Residual norm at which integration stops. Zero runs to the
    /// rounding floor of the residual.
    pub fn stop_tol(mut self, tol: f64) -> Self {
        self.stop_tol = Some(tol);
        self
    }

    pub fn solve(&self, x0: &DVector<f64>) -> Result<Trajectory> {
        let problem = self.problem;
        check_positive("h", self.h)?;
        check_positive("t_end", self.t_end)?;
        check_len("x0", problem.dim(), x0.as_slice())?;
        if let Some(anchor) = self.anchor {
            check_len("x_star", problem.dim(), anchor.as_slice())?;
        }
        let stop = self.stop_tol.unwrap_or(1e-12 * problem.c().norm().max(1.0));
        let a_fro = problem.a().norm();
        let b_fro = problem.b().norm();
        let c_norm = problem.c().norm();
        let rounding_floor =
            |x: &DVector<f64>| 64.0 * f64::EPSILON * ((a_fro + b_fro) * x.norm() + c_norm);
        let lyap = |x: &DVector<f64>| self.anchor.map(|a| lyapunov(x, a).expect("length checked"));
        let lip = lipschitz_constant(self.params, problem);
        let step_cap = |rn: f64| {
            let stiffness = rho(self.params, rn) * lip;
            if stiffness > 0.0 {
                self.h.min(STIFFNESS_FRACTION / stiffness)
            } else {
                self.h
            }
        };

        let mut x = x0.clone();
        let mut rn = problem.residual_unchecked(&x).norm();
        let mut traj = Trajectory::start(x.clone(), rn);
        let mut v = lyap(&x);
        let mut t = 0.0;
        let mut h_cur = step_cap(rn);

        while t < self.t_end {
            if rn <= stop || rn <= rounding_floor(&x) {
                traj.push(self.t_end, x.clone(), rn);
                return Ok(traj);
            }
            let remaining = self.t_end - t;
            let step = h_cur.min(remaining);
            let cand = self.rk4(&x, step);
            let rc = problem.residual_unchecked(&cand).norm();
            let vc = lyap(&cand);
            let lyap_ok = match (v, vc) {
                (Some(v0), Some(v1)) => v1 <= v0,
                _ => true,
            };
            // Strict decrease: RK4 has spurious fixed points on this non-Lipschitz
            // field, where a full step returns the same state.
            if !(rc.is_finite() && rc < rn && lyap_ok) {
                h_cur *= 0.5;
                if h_cur < MIN_STEP_FRACTION * step_cap(rn) || t + h_cur == t {
                    if rn > STALL_BAND * rounding_floor(&x) {
                        return Err(GaveError::StepUnderflow { t });
                    }
                    traj.stalled = true;
                    traj.push(self.t_end, x.clone(), rn);
                    return Ok(traj);
                }
                continue;
            }
            t = if step == remaining { self.t_end } else { t + step };
            x = cand;
            rn = rc;
            v = vc;
            traj.push(t, x.clone(), rn);
            traj.steps += 1;
            h_cur = (2.0 * h_cur).min(step_cap(rn));
        }
        Ok(traj)
    }

    fn rk4(&self, x: &DVector<f64>, h: f64) -> DVector<f64> {
        let f = |y: &DVector<f64>| field_from_residual(self.params, self.problem, &self.problem.residual_unchecked(y));
        let k1 = f(x);
        let k2 = f(&(x + &k1 * (0.5 * h)));
        let k3 = f(&(x + &k2 * (0.5 * h)));
        let k4 = f(&(x + &k3 * h));
        x + (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0)
    }
}

/// Integrates the flow from `x0` over `[0, t_end]` with base step `h`.
pub fn reference_flow_solve(
    problem: &GaveProblem,
    params: &FlowParams,
    h: f64,
    t_end: f64,
    x0: &DVector<f64>,
) -> Result<Trajectory> {
    ReferenceFlow::new(problem, params, h, t_end).solve(x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::settling_time_bound;
    use crate::problem::certify;

    fn scalar() -> GaveProblem {
        GaveProblem::from_row_slices(1, &[2.0], &[1.0], &[1.0]).unwrap()
    }

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn constant_at_solution() {
        let traj = reference_flow_solve(&scalar(), &FlowParams::default(), 1e-3, 2.0, &v(&[1.0])).unwrap();
        assert_eq!(traj.times, vec![0.0, 2.0]);
        assert!(traj.states.iter().all(|x| x[0] == 1.0));
        assert_eq!(traj.steps, 0);
    }

    #[test]
    fn reaches_solution_by_settling_bound() {
        let p = FlowParams::default();
        let prob = scalar();
        let t_max = settling_time_bound(&p, &certify(&prob)).unwrap().t_max;
        assert!((t_max - 8.120_414_121_025_742).abs() < 1e-12);
        for start in [0.0, 1e6 + 1.0, -1e6 + 1.0] {
            let traj = reference_flow_solve(&prob, &p, 1e-3, t_max, &v(&[start])).unwrap();
            assert!(traj.final_residual() <= 1e-6, "start {start}: {}", traj.final_residual());
            assert_eq!(traj.end_time(), t_max);
            assert!(traj.residual_norms.windows(2).all(|w| w[1] <= w[0]));
            assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn anchored_guard_keeps_lyapunov_monotone() {
        let prob = scalar();
        let p = FlowParams::default();
        let star = v(&[1.0]);
        let traj = ReferenceFlow::new(&prob, &p, 1e-2, 10.0).anchor(&star).solve(&v(&[-50.0])).unwrap();
        let vals: Vec<f64> = traj.states.iter().map(|x| lyapunov(x, &star).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] <= w[0]));
        assert!(traj.final_residual() <= 1e-12);
    }

    #[test]
    fn interpolation_between_samples() {
        let traj = Trajectory {
            times: vec![0.0, 1.0, 3.0],
            states: vec![v(&[0.0]), v(&[2.0]), v(&[6.0])],
            residual_norms: vec![0.0; 3],
            steps: 2,
            stalled: false,
        };
        assert_eq!(traj.state_at(0.5).unwrap()[0], 1.0);
        assert_eq!(traj.state_at(2.0).unwrap()[0], 4.0);
        assert_eq!(traj.state_at(3.0).unwrap()[0], 6.0);
        assert!(traj.state_at(3.5).is_none());
    }

    #[test]
    fn rejects_bad_step() {
        assert!(reference_flow_solve(&scalar(), &FlowParams::default(), 0.0, 1.0, &v(&[0.0])).is_err());
    }
}
