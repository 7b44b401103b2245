//! Library half of the `conformal` binary: argument definitions, dataset
//! parsing, the four commands and report rendering.

pub mod args;
pub mod commands;
pub mod dataset;
pub mod error;
pub mod report;
pub mod targets;

pub use args::Cli;
pub use commands::run;
pub use error::{CliError, CliResult};
pub use report::{Format, RunReport, Status};

/// Exit status for input and usage errors.
pub const EXIT_USAGE: i32 = 2;
