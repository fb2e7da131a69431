use thiserror::Error;

pub type Result<T, E = GaveError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GaveError {
    #[error("{what}: expected length {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{what} must be square, got {rows}x{cols}")]
    NotSquare {
        what: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("{0} contains a non-finite entry")]
    NonFinite(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("problem is not certified: sigma_min(A) - ||B|| = {gap:e} does not exceed the tolerance")]
    Uncertified { gap: f64 },

    #[error("sigma_min(A) = {sigma_min} must exceed 1 for the B = I bound")]
    NotAveRegime { sigma_min: f64 },

    #[error("{0} is numerically singular")]
    Singular(&'static str),

    #[error("iteration diverged at step {step}: residual norm {residual:e}")]
    Divergence { step: usize, residual: f64 },

    #[error("step size underflow at t = {t}: no step decreases the residual")]
    StepUnderflow { t: f64 },

    #[error("trajectory covers [0, {covered}] but the horizon is {horizon}")]
    TrajectoryTooShort { covered: f64, horizon: f64 },

    #[error("iterate log stops at step {steps} before the horizon and did not converge")]
    LogTooShort { steps: usize },

    #[error("no admissible step size found after {halvings} halvings")]
    NoStepFound { halvings: u32 },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn check_len(what: &'static str, expected: usize, v: &[f64]) -> Result<()> {
    if v.len() != expected {
        return Err(GaveError::DimensionMismatch {
            what,
            expected,
            found: v.len(),
        });
    }
    Ok(())
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(GaveError::InvalidParameter {
            name,
            reason: format!("must be positive and finite, got {value}"),
        });
    }
    Ok(())
}
