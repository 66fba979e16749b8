use han_core::TensorError;
use han_data::DataError;
use han_metrics::MetricError;
use han_model::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad config file, flag or hyperparameter.
    #[error("config: {0}")]
    Config(String),
    /// Missing, unreadable or corrupt files.
    #[error("io: {0}")]
    Io(String),
    /// NaN/inf during training or inference.
    #[error("numerical: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        match e {
            DataError::Contract(_) | DataError::Sampling(_) => CliError::Config(e.to_string()),
            _ => CliError::Io(e.to_string()),
        }
    }
}

impl From<TensorError> for CliError {
    fn from(e: TensorError) -> Self {
        match e {
            TensorError::NonFinite { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Tensor(t) => t.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        match e {
            MetricError::Data(d) => d.into(),
            MetricError::EmptyDataset(_) => CliError::Io(e.to_string()),
            MetricError::Model { ref detail, .. } if detail.starts_with("numerical") => CliError::Numerical(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}
