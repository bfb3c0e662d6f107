//! Config parsing, output writing and command runners.

pub mod config;
pub mod output;
pub mod run;

pub use config::{parse_config, ConfigError, OutputKind, RunRequest};
pub use output::{emit_outputs, OutputError};
pub use run::RunError;
