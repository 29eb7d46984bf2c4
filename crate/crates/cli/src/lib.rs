//! Building blocks of the `rlbsp` command-line tool.

pub mod commands;
pub mod config;
pub mod error;

pub use config::{Overrides, RunConfig};
pub use error::{CliError, CliResult};
