use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library.
///
/// The variants are grouped so that front ends can map them onto
/// "bad input", "bad data" and "too large" classes (see [`Error::class`]).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("capacity exceeded: {what} ({value} > limit {limit})")]
    Capacity {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("circuit error: {0}")]
    Circuit(String),

    #[error("noise error: {0}")]
    Noise(String),

    #[error("ill-conditioned calibration matrix (condition number {0:.3e})")]
    IllConditioned(f64),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("i/o error: {0}")]
    Io(String),
}

/// Coarse classification used by command-line front ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Data,
    Capacity,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Capacity { .. } => ErrorClass::Capacity,
            Error::Parse { .. } | Error::InvalidArgument(_) | Error::Domain(_) => {
                ErrorClass::Input
            }
            _ => ErrorClass::Data,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
