use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("png decode failed: {0}")]
    Decode(String),
    #[error("unsupported image format: {0}")]
    Unsupported(String),
    #[error("{0}")]
    Contract(String),
    #[error("patch sampling: {0}")]
    Sampling(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("dataset {}: {detail}", path.display())]
    Dataset { path: PathBuf, detail: String },
}

pub type Result<T> = std::result::Result<T, DataError>;

impl DataError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DataError::Io { path: path.into(), source }
    }
}
