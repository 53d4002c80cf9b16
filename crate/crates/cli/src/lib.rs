//! Library side of the `phiform` command-line tool: run configuration,
//! subcommand rendering and the verification battery.

pub mod commands;
pub mod config;
pub mod error;
pub mod verify;

pub use config::{Command, OutputFormat, Representation, RunConfig, VerifyLevel};
pub use error::{CliError, CliResult};
