//! Std companion to `cf-core`: output tables, configuration files, the
//! thread-pool executor and the `cf-sim` command implementations.

pub mod commands;
pub mod config;
mod error;
pub mod exec;
pub mod table;

pub use error::CliError;
