//! Command-line front end: config loading, the verification checks and the
//! JSON report.

pub mod checks;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use commands::{run_command, Cli, Command, Outcome};
pub use config::{load_config, ExperimentConfig};
pub use error::CliError;
pub use report::{Check, Report};
