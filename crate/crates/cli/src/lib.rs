//! Sweep orchestration, checkpointing and CSV emission for the Floquet toolkit.

pub mod commands;
pub mod config;
pub mod error;
pub mod grid;
pub mod sweep;

pub use commands::{execute, selftest, Command};
pub use config::{Overrides, RunConfig};
pub use error::CliError;
pub use sweep::{Report, RunOptions};
