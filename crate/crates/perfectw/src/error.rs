//! Error types shared by all modules.

use thiserror::Error;

/// Errors produced by lattice construction, design solving, loss
/// integration, and the CLI front end.
#[derive(Error, Debug)]
pub enum Error {
    /// A parameter failed validation. `field` names the offending input.
    #[error("invalid {field}: {message}")]
    InvalidInput { field: String, message: String },

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A numeric routine failed or produced a result outside tolerance.
    /// `residual` carries the offending magnitude when one is available.
    #[error("numeric failure: {message} (residual {residual:e})")]
    Numeric { message: String, residual: f64 },

    /// File I/O while reading configuration or writing output.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// A state file or configuration file could not be parsed.
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
}

impl Error {
    pub(crate) fn invalid(field: &str, message: impl Into<String>) -> Self {
        Error::InvalidInput {
            field: field.to_string(),
            message: message.into(),
        }
    }

    pub(crate) fn numeric(message: impl Into<String>, residual: f64) -> Self {
        Error::Numeric {
            message: message.into(),
            residual,
        }
    }

    /// Process exit status for the CLI: usage errors exit 2, numeric
    /// failures exit 3.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput { .. }
            | Error::DimensionMismatch(_)
            | Error::Parse { .. }
            | Error::Io { .. } => 2,
            Error::Numeric { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
