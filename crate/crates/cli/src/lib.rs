//! Operator documents, reports and subcommands of the `mumhodge` tool.

pub mod commands;
pub mod document;
pub mod error;
pub mod report;

pub use commands::{Outcome, RunOptions};
pub use document::{OperatorDocument, RecordsDocument};
pub use error::CliError;
