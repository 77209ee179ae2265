use thiserror::Error;

/// Errors produced anywhere in the amplitude pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("angular frequency {omega:e} rad/s is outside the tabulated range [{min:e}, {max:e}] rad/s")]
    OutOfRange { omega: f64, min: f64, max: f64 },

    #[error("invalid argument: {0}")]
    Usage(String),

    #[error("singular input: {0}")]
    Singular(String),

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error(
        "quadrature did not converge: estimate {estimate:e} with error {error:e} after {subdivisions} subdivisions"
    )]
    Convergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid value for `{key}`: {message}")]
    Validation { key: String, message: String },

    #[error("{0}")]
    Io(String),

    #[error("scan aborted at point {index} (axis value {value:e}) after {completed} completed points: {source}")]
    Scan {
        index: usize,
        value: f64,
        completed: usize,
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Validation {
            key: key.into(),
            message: msg.into(),
        }
    }

    /// True for failures caused by bad user input rather than numerics.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Convergence { .. } => false,
            Error::Scan { source, .. } => source.is_validation(),
            _ => true,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
