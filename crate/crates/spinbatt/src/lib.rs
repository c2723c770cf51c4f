//! Command-line front end and file formats for `spinbatt-core`.

pub mod cli;
pub mod error;
pub mod format;
pub mod output;
pub mod sweep;
pub mod verify;

pub use error::CliError;
