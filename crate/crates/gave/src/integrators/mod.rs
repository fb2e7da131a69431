//! Time integration of the flow: the explicit Euler iteration with its
//! finite-step guarantee, a high-accuracy reference integrator, and the
//! comparison between the two.

mod baseline;
mod closeness;
mod euler;
mod reference;
mod step_search;

pub use baseline::baseline_flow_solve;
pub use closeness::closeness_check;
pub use euler::{continuous_envelope, fixed_step_count, forward_euler_solve, settle_horizon, EulerConfig, IterateLog};
pub use reference::{reference_flow_solve, ReferenceFlow, Trajectory};
pub use step_search::{find_step, MAX_HALVINGS};
