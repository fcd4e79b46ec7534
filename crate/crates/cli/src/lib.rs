//! Command-line front end for one-shot FedPNN experiments.
//!
//! Four subcommands: `run` (one federation round), `sweep` (threshold or
//! bandwidth grid), `eval-synth` (synthetic table quality) and `partition`
//! (server/client shards on disk). Everything is deterministic given the
//! inputs and the seed.

pub mod args;
pub mod commands;
pub mod config;
pub mod plot;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use thiserror::Error;

/// Failure of a command, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config or parameter values. Exit code 1.
    #[error("{0}")]
    Validation(String),
    /// Unreadable inputs, unusable data or a failed pipeline stage. Exit code 2.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl From<fedpnn_core::federation::FederationError> for CliError {
    fn from(err: fedpnn_core::federation::FederationError) -> Self {
        match err {
            fedpnn_core::federation::FederationError::Config(e) => CliError::Validation(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
/// Normal output goes to `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = if err.use_stderr() {
                write!(stderr, "{}", err.render())
            } else {
                write!(stdout, "{}", err.render())
            };
            return code;
        }
    };
    match commands::dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            err.exit_code()
        }
    }
}
