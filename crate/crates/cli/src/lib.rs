//! Experiment runner: configuration, pipelines, sweeps and artifact
//! writing for the `cvqkd` binary.

pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;
pub mod range;
pub mod sweep;
pub mod validate;

pub use config::ExperimentConfig;
pub use error::{CliError, Result};
