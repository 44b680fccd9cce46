//! Command-line front end: instance analysis, fidelity curves, family sweeps
//! and the families table, emitted as JSON reports and CSV tables.

pub mod args;
pub mod error;
pub mod format;
pub mod report;
pub mod run;
pub mod spec_parse;

pub use error::{CliError, ExitCode};
pub use run::{execute, Outcome};
