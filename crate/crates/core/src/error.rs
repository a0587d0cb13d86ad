use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library. Everything except `Io` is a usage or
/// validation problem that the caller can fix by changing its inputs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("index {index} out of range for a population of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("member {index} is not on the plateau ({ones} ones, plateau has {plateau})")]
    NotOnPlateau {
        index: usize,
        ones: usize,
        plateau: usize,
    },

    #[error("enumeration needs {outcomes} outcomes, limit is {limit}")]
    EnumerationTooLarge { outcomes: u128, limit: u128 },

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures caused by bad inputs rather than the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
