//! The `colf` command: `write`, `inspect`, `query` and `bench`.
//!
//! Exit status is 0 on success, 1 when the data is at fault (a CSV row that
//! does not fit the schema, a corrupt file, a failed benchmark check) and 2
//! when the command itself cannot run (bad flags, missing inputs, files that
//! are not COLF). Results go to stdout; diagnostics go to stderr.

pub mod args;
pub mod commands;
pub mod error;
pub mod inspect;
pub mod settings;

pub use args::Cli;
pub use commands::run;
pub use error::{CliError, Result};
