use gave::GaveError;

pub const INPUT: u8 = 1;
pub const UNCERTIFIED: u8 = 2;
pub const NUMERICAL: u8 = 3;

/// An error message with its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self::new(NUMERICAL, message)
    }
}

impl From<GaveError> for Failure {
    fn from(err: GaveError) -> Self {
        let code = match err {
            GaveError::Uncertified { .. } => UNCERTIFIED,
            GaveError::Divergence { .. }
            | GaveError::StepUnderflow { .. }
            | GaveError::TrajectoryTooShort { .. }
            | GaveError::LogTooShort { .. }
            | GaveError::NoStepFound { .. } => NUMERICAL,
            _ => INPUT,
        };
        Self::new(code, err.to_string())
    }
}

pub type CliResult<T = ()> = Result<T, Failure>;
