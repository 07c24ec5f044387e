use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while loading data, configuring experiments, or writing results.
#[derive(Debug, Error)]
pub enum Error {
    /// A record could not be split or parsed.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A rating value is not a member of the configured scale.
    #[error("line {line}: rating {value} is not in the rating scale {scale}")]
    Domain {
        line: usize,
        value: String,
        scale: String,
    },

    /// Experiment or scenario parameters cannot be resolved.
    #[error("configuration error: {0}")]
    Config(String),

    /// An API was called with inputs that do not belong together.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the error stems from input data rather than configuration or I/O.
    pub fn is_data_error(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Domain { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
