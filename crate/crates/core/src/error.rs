use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameter values or combinations.
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed input of the right shape (width mismatch, empty row set, ...).
    #[error("input error: {0}")]
    Input(String),

    /// A file does not have the expected columns or layout.
    #[error("schema error: {0}")]
    Schema(String),

    /// Impurity of a region with no observations.
    #[error("undefined region: class counts are all zero")]
    UndefinedRegion,

    /// Training data cannot support the requested model (e.g. a single class).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// The model does not fit the task (binary model on a k-class dataset, schema drift).
    #[error("model/task mismatch: {0}")]
    TaskMismatch(String),

    #[error("numeric failure at iteration {iteration}: {message}")]
    Numeric { iteration: usize, message: String },

    /// An operation was called outside its contract.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Input(_)
            | Error::Schema(_)
            | Error::Csv(_)
            | Error::Json(_)
            | Error::Contract(_) => 2,
            Error::DegenerateData(_) | Error::UndefinedRegion => 3,
            Error::TaskMismatch(_) => 4,
            Error::Numeric { .. } => 5,
            Error::Io { .. } => 1,
        }
    }
}
