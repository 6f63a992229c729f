use thiserror::Error;

/// Failure modes shared across the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shifted QR iteration did not converge after {sweeps} sweeps")]
    NonConvergence { sweeps: usize },

    #[error("matrix is numerically singular (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("integrator exceeded the step limit of {limit}")]
    StepLimitExceeded { limit: usize },

    #[error("integration produced a non-finite value at t = {t}")]
    NonFinite { t: f64 },

    #[error("map is not dichotomic: {0} eigenvalue(s) lie in the unit-circle band")]
    NotDichotomic(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid system definition: {0}")]
    Validation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for failures of the numerical machinery itself (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::StepLimitExceeded { .. }
                | Error::NonFinite { .. }
                | Error::Singular { .. }
                | Error::DimensionMismatch { .. }
        )
    }
}
