use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("simulation produced a non-finite value at step {step}: {what}")]
    Simulation { step: usize, what: String },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("quadrature did not converge on [{a}, {b}]: achieved error {achieved:e}")]
    Quadrature { a: f64, b: f64, achieved: f64 },

    #[error("monte carlo run aborted: {failed} of {total} replications failed ({reason})")]
    TooManyFailures { failed: usize, total: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}
