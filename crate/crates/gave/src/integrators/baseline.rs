use nalgebra::DVector;

use super::reference::Trajectory;
use crate::dynamics::GaoWangFlow;
use crate::error::{check_len, check_positive, Result};
use crate::problem::GaveProblem;

/// Fixed-step RK4 on the inverse-based baseline flow.
///
/// The trajectory records the output `x = A⁻¹(Bz + c)` and its GAVE residual;
/// integration stops once that residual is at most `tol`.
pub fn baseline_flow_solve(
    problem: &GaveProblem,
    rho_scale: f64,
    h: f64,
    t_end: f64,
    z0: &DVector<f64>,
    tol: f64,
) -> Result<Trajectory> {
    check_positive("h", h)?;
    check_positive("t_end", t_end)?;
    check_positive("tol", tol)?;
    check_len("z0", problem.dim(), z0.as_slice())?;
    let flow = GaoWangFlow::new(problem, rho_scale)?;

    let record = |z: &DVector<f64>| {
        let x = flow.output(z).expect("length checked");
        let rn = problem.residual_unchecked(&x).norm();
        (x, rn)
    };
    let mut z = z0.clone();
    let (x, mut rn) = record(&z);
    let mut traj = Trajectory::start(x, rn);
    let mut t = 0.0;
    while t < t_end && rn > tol {
        let step = h.min(t_end - t);
        let k1 = flow.field_unchecked(&z);
        let k2 = flow.field_unchecked(&(&z + &k1 * (0.5 * step)));
        let k3 = flow.field_unchecked(&(&z + &k2 * (0.5 * step)));
        let k4 = flow.field_unchecked(&(&z + &k3 * step));
        z += (k1 + (k2 + k3) * 2.0 + k4) * (step / 6.0);
        t = if step == t_end - t { t_end } else { t + step };
        let (x, r) = record(&z);
        rn = r;
        traj.push(t, x, rn);
        traj.steps += 1;
    }
    Ok(traj)
}
