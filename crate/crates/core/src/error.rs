use thiserror::Error;

use crate::radius::{RadiusResult, UndecidedReport};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("t0 is not a root of P(0, T)")]
    NotARoot,

    #[error("ramified branch: {0}")]
    RamifiedBranch(String),

    #[error("complex root certification failed after {bits} bits of refinement")]
    PrecisionExhausted { bits: u32 },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("tracking failed: {0}")]
    TrackingFailed(String),

    #[error("obstruction undecided: {0}")]
    ObstructionUndecided(String),

    #[error("undecided at candidate modulus {}: {}", .0.modulus, .0.reason)]
    Undecided(Box<UndecidedReport>),

    #[error("exact radius {} disagrees with the coefficient estimate", .0.decimal)]
    CrossValidationFailed(Box<RadiusResult>),

    #[error("fewer than three finite directional profiles")]
    InsufficientData,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
