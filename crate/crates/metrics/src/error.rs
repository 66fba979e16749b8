use std::path::PathBuf;

use han_data::DataError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("{0}")]
    Contract(String),
    #[error("no images found in {}", .0.display())]
    EmptyDataset(PathBuf),
    #[error("model failed on {name}: {detail}")]
    Model { name: String, detail: String },
    #[error(transparent)]
    Data(#[from] DataError),
}

pub type Result<T> = std::result::Result<T, MetricError>;
