//! Library side of the `han` command: run configs, checkpoints and the subcommands.

pub mod checkpoint;
pub mod commands;
pub mod config;
pub mod error;
pub mod train;

pub use checkpoint::Checkpoint;
pub use commands::{cmd_degrade, cmd_eval, cmd_infer, load_model, EvalOptions};
pub use config::RunConfig;
pub use error::{CliError, Result};
pub use train::{cmd_train, fit, PatchSource};
