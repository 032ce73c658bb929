use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the restoration library.
#[derive(Debug, Error)]
pub enum PacoError {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("weights cannot be estimated: no patch is free of missing samples")]
    NoCompletePatches,

    #[error("non-finite value in {stage} at iteration {iteration}")]
    NonFinite { stage: &'static str, iteration: usize },
}

impl PacoError {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        PacoError::Shape(msg.into())
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        PacoError::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PacoError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        PacoError::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, PacoError>;
