//! Library side of the `trp` command-line tool: configuration, commands and
//! run records.

pub mod commands;
pub mod config;
pub mod error;
pub mod record;
pub mod table;

pub use commands::{evaluate_config, replay, run, Context, Outcome};
pub use config::{load, Command, RunConfig};
pub use error::CliError;
pub use record::{read_records, RecordWriter, RunRecord};
