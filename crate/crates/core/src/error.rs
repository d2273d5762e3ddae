//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Not enough accepted rounds to form an estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Closed-form tables exist only for quantum relay strategies.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// CHSH value above the quantum bound beyond the allowed tolerance.
    #[error("supra-quantum CHSH value {value} exceeds {bound} beyond tolerance {tolerance}")]
    SupraQuantum {
        value: f64,
        bound: f64,
        tolerance: f64,
    },

    #[error("reconciliation failed: {0}")]
    ReconciliationFailure(String),

    /// Configuration problem; `field` is the JSON path of the offending entry.
    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
