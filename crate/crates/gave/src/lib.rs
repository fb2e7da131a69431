//! Solve generalized absolute value equations
//!
//! ```text
//! A x - B |x| = c
//! ```
//!
//! with a gradient-type flow whose settling time is bounded independently
//! of the starting point, and with its forward-Euler discretization.
//!
//! The crate is organized around a few pieces:
//!
//! * [`GaveProblem`] holds `(A, B, c)`; [`certify`] checks the unique
//!   solvability condition `σ_min(A) > ‖B‖` and [`error_bounds`] turns a
//!   residual into a bracket on the distance to the solution.
//! * [`FlowParams`] and [`flow_field`] define the continuous dynamics;
//!   [`settling_time_bound`] bounds the time to reach the solution.
//! * [`integrators`] contains the Euler iteration, an adaptive RK4 reference
//!   integrator, the step-size search and the closeness check.
//! * [`reformulations`] maps LCP and HLCP instances to GAVE and back.
//! * [`instances`] builds seeded, certified random instances.
//! * [`io`] reads and writes JSON problem files and CSV traces.
//!
//! ```
//! use gave::{certify, forward_euler_solve, EulerConfig, FlowParams, GaveProblem};
//! use nalgebra::DVector;
//!
//! // 2x - |x| = 1 has the unique solution x = 1.
//! let problem = GaveProblem::from_row_slices(1, &[2.0], &[1.0], &[1.0])?;
//! assert!(certify(&problem).certified);
//!
//! let config = EulerConfig { eta: 0.05, safeguard: true, tol: 1e-10, ..EulerConfig::default() };
//! let params = FlowParams::default_xi();
//! let log = forward_euler_solve(&problem, &params, &config, &DVector::zeros(1))?;
//! assert!(log.converged);
//! assert!((log.last()[0] - 1.0).abs() < 1e-9);
//! # Ok::<(), gave::GaveError>(())
//! ```

mod error;
pub mod dynamics;
pub mod instances;
pub mod integrators;
pub mod io;
pub mod linalg;
pub mod problem;
pub mod reformulations;

pub use dynamics::{
    baseline_gw_field, flow_field, lipschitz_constant, lyapunov, rho, settling_time_bound,
    settling_time_bound_lyyhc, FlowParams, GaoWangFlow, SettlingBound,
};
pub use error::{GaveError, Result};
pub use instances::{random_solvable_ave, random_solvable_gave, random_spd_lcp, GeneratorSpec};
pub use integrators::{
    baseline_flow_solve, closeness_check, continuous_envelope, find_step, fixed_step_count,
    forward_euler_solve, reference_flow_solve, settle_horizon, EulerConfig, IterateLog,
    ReferenceFlow, Trajectory,
};
pub use problem::{
    certify, certify_unique, default_certification_tol, error_bounds, residual,
    smallest_singular_value, spectral_norm, verify_solution, Certificate, ErrorBracket,
    GaveProblem,
};
pub use reformulations::{
    gave_solution_to_hlcp, gave_to_hlcp, hlcp_to_gave, lcp_to_gave, recover_lcp_solution,
    verify_lcp, ComplementarityReport, HlcpProblem, LcpProblem,
};
