use thiserror::Error;

/// Errors raised by the model routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DyadicError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameters { field: &'static str, reason: String },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("branch not available: {0}")]
    Branch(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("regime mismatch ({regime}): {hint}")]
    RegimeMismatch { regime: String, hint: String },

    #[error("bracketing failed: {0}")]
    Bracketing(String),

    #[error("insufficient samples: found {found}, need at least {required}")]
    InsufficientSamples { found: usize, required: usize },

    #[error("indeterminate divergence profile: {0}")]
    Indeterminate(String),

    #[error("division by zero: {0}")]
    Domain(String),
}

impl DyadicError {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Self::InvalidParameters { field, reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, DyadicError>;
