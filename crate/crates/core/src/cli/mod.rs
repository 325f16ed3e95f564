//! Configuration, orchestration and file output for the `sshq` binary.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::run;
pub use config::{parse_config, resolve_config, Command, RunConfig};
