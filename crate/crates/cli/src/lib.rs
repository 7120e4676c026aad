//! Run, sweep and validation commands behind the `grover` binary.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use grover_core::GroverError;
use thiserror::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
/// The start state needs no search (`AlreadySolved`) or cannot be searched
/// from (`OrthogonalStart`).
pub const EXIT_PRECHECK: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] GroverError),

    #[error("config: {0}")]
    Config(String),

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(GroverError::Precheck(_)) => EXIT_PRECHECK,
            _ => EXIT_FAILURE,
        }
    }
}
