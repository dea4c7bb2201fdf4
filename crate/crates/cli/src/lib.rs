//! Library side of the `specclust` command-line tool.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;
pub mod report;

pub use error::{CliError, Result};
pub use report::RunReport;
