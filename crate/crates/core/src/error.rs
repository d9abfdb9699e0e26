//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by solvers, converters and serialization.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),

    #[error("square root of negative rational {0}")]
    NegativeSqrt(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("instance validation failed:\n{}", .0.join("\n"))]
    InvalidInstance(Vec<String>),

    #[error("JSON error at {location}: {message}")]
    Json { location: String, message: String },

    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersion { expected: u32, found: u32 },

    #[error("unknown identifier {0:?}")]
    UnknownId(String),

    #[error("scheme {scheme} is not incentive compatible for the provider: deviating from action {action:?} to {better:?} gains {gain}")]
    NotIc {
        scheme: usize,
        action: String,
        better: String,
        gain: String,
    },

    #[error("menu precondition violated: {0}")]
    Precondition(String),

    #[error("linear program reported unbounded where a bounded optimum is guaranteed")]
    UnexpectedUnbounded,

    #[error("linear program infeasible: {0}")]
    InfeasibleProgram(String),

    #[error("problem size exceeds guard: {detail} ({estimate} > {limit})")]
    SizeGuard {
        detail: String,
        estimate: u128,
        limit: u128,
    },

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn json(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Json {
            location: location.into(),
            message: message.into(),
        }
    }
}
