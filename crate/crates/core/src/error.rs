use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A model or algorithm parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A configuration combines pieces that cannot work together.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A value lies outside the declared state space.
    #[error("value {value} is not one of the declared states")]
    Domain { value: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("{path}: no values found")]
    EmptyInput { path: PathBuf },

    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn insufficient(msg: impl Into<String>) -> Self {
        Error::InsufficientData(msg.into())
    }

    /// True for errors caused by bad inputs rather than bad data or I/O.
    pub fn is_parameter_error(&self) -> bool {
        matches!(self, Error::Parameter(_) | Error::Config(_))
    }
}
