//! Command-line front end for the dyadic shell model.

pub mod config;
pub mod output;
pub mod run;
pub mod sweep;
pub mod verify;

pub use config::{parse_config, Cli, Command, CommandKind, ConfigError, Format, RunConfig};
pub use run::{run, RunError, RunOutcome};
pub use sweep::SweepRecord;
