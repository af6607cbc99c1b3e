//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the simulator and the training loops.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a precondition (non-finite angle, negative
    /// rate, non-physical state, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Vector or matrix dimensions do not match.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A qubit index was out of range for the state it was applied to.
    #[error("qubit index {index} out of range for {qubits}-qubit state")]
    QubitIndexOutOfRange { index: usize, qubits: usize },

    /// The calibration or PCA fit could not be performed on the data.
    #[error("fit failure: {0}")]
    FitFailure(String),

    /// A binary or text input could not be parsed.
    #[error("parse error at byte {offset}: {message}")]
    ParseError { offset: u64, message: String },

    /// The probability-to-feature map is not invertible at this point.
    #[error("inversion failure: {0}")]
    InversionFailure(String),

    /// A training loop produced a non-finite loss and was aborted.
    #[error("training aborted at epoch {epoch}: {details}")]
    TrainingAborted { epoch: usize, details: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::ShapeMismatch(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
