//! Error type shared by the whole crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration, preconditions on knobs, or mismatched model pairs.
    #[error("{0}")]
    Config(String),

    /// Problems with input data: bad files, shape mismatches, out-of-range values.
    #[error("{0}")]
    Data(String),

    /// Spatial shape incompatible with the model (e.g. not divisible by the
    /// downsampling rate).
    #[error("{0}")]
    Shape(String),

    /// Training diverged or produced a non-finite loss.
    #[error("training failed at step {step}: {msg}")]
    Training { step: usize, msg: String },

    /// A metric that is undefined for the given inputs (e.g. single-class labels).
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("image codec error: {0}")]
    ImageCodec(#[from] image::ImageError),

    #[error("tensor error: {0}")]
    Tensor(#[from] candle_core::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    /// Stable machine-parsable category used by the CLI error line.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Config(_) => "config-error",
            Error::Data(_) | Error::Shape(_) | Error::UndefinedMetric(_) | Error::ImageCodec(_) => {
                "data-error"
            }
            Error::Training { .. } => "training-error",
            Error::Io(_) => "io-error",
            Error::Tensor(_) | Error::Serde(_) => "internal-error",
        }
    }

    /// Process exit code associated with [`Error::category`].
    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "config-error" => 2,
            "data-error" => 3,
            "training-error" => 4,
            "io-error" => 5,
            _ => 1,
        }
    }
}
