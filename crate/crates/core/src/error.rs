use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside its documented domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A random graph could not be drawn connected within the retry budget.
    #[error("graph construction failed: {0}")]
    Construction(String),

    /// Factorization or eigensolver failure.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed edge list or trace file.
    #[error("parse error in {path}: {msg}")]
    Parse { path: String, msg: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than a failed run.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Parameter(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
