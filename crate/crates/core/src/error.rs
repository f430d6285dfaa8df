use thiserror::Error;

/// Errors raised by the numerical laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} = {value} is out of range: {constraint}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        constraint: String,
    },

    #[error("energy {energy} is not a sum of {dim} squares")]
    EmptyEigenspace { energy: u64, dim: usize },

    #[error("covering would need about {estimate} centers, above the cap of {cap}")]
    ResourceLimit { estimate: f64, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub(crate) fn out_of_range(what: &'static str, value: f64, constraint: impl Into<String>) -> Error {
    Error::OutOfRange {
        what,
        value,
        constraint: constraint.into(),
    }
}
