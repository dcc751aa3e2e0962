use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("insufficient training data: {positives} positive and {negatives} negative samples")]
    InsufficientData { positives: usize, negatives: usize },

    #[error("model file line {line}: {msg}")]
    ModelFormat { line: usize, msg: String },

    #[error("model file version mismatch: expected `{expected}`, found `{found}`")]
    VersionMismatch { expected: String, found: String },

    #[error("image decode error in {path}: {msg}")]
    ImageDecode { path: PathBuf, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
