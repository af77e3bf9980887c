//! Experiment runner behind the `qinterf` binary.

pub mod args;
pub mod commands;
pub mod engine;
pub mod error;

pub use commands::run;
pub use error::{exit, CliError, Result};
