use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid range {name}: {reason}")]
    InvalidRange { name: &'static str, reason: String },

    #[error("invalid count {name}: {reason}")]
    InvalidCount { name: &'static str, reason: String },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("treatment index {index} out of range 1..={count}")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("population not evaluated: expected {expected} members, found {found}")]
    UnevaluatedPopulation { expected: usize, found: usize },

    #[error("need at least {required} replications, got {found}")]
    InsufficientReplications { required: usize, found: usize },

    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },

    #[error("{path}:{line}: expected `key=value`")]
    Syntax { path: String, line: usize },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// True for errors caused by user-supplied configuration.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::UnknownKey(_)
                | Error::InvalidValue { .. }
                | Error::Syntax { .. }
                | Error::InvalidRange { .. }
                | Error::InvalidCount { .. }
                | Error::InvalidParameter { .. }
        )
    }
}
