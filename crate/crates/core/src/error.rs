use thiserror::Error;

/// Errors raised by the state containers, correlation measures and integrators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("integration failure at t = {t}: {reason}")]
    IntegrationFailure { t: f64, reason: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
