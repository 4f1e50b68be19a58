//! Command-line front end for `rado-core`: argument parsing, the result
//! cache and the reproduction report.

pub mod cache;
pub mod commands;
pub mod error;
pub mod reproduce;

use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

pub use commands::{Cli, Command};
pub use error::{CliError, Result};

/// Parses `argv` (program name first) and runs the command, writing the
/// report to `out`. Help and version text also go to `out`.
pub fn run<I, T>(argv: I, out: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            write!(out, "{}", e.render()).map_err(|err| CliError::io("writing output", err))?;
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    commands::execute(cli.command, out)
}

/// [`run`], with errors printed to stderr; returns the process exit code.
pub fn run_command<I, T>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match run(argv, out) {
        Ok(()) => 0,
        Err(CliError::Usage(e)) => {
            let _ = e.print();
            e.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
