//! Pipeline around `bec-entanglement`: configuration, CSV files, fit reports
//! and the command implementations behind the `bec-qpt` binary.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod report;

pub use config::RunConfig;
pub use error::{exit, CliError, Result};
