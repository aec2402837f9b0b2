//! Configuration parsing, trace ingestion, experiment sweeps, and output
//! rendering behind the `muledtn` binary.

pub mod commands;
pub mod config;
mod error;
pub mod ingest;
pub mod output;

pub use error::CliError;

pub type Result<T, E = CliError> = std::result::Result<T, E>;
