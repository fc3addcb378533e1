//! Command-line front end: argument parsing, JSON/CSV emission and the
//! verb implementations behind the `fepkit` binary.

pub mod angle;
pub mod args;
pub mod commands;
pub mod error;
pub mod json;
pub mod model;
pub mod output;

use clap::Parser;

pub use error::CliError;

/// Parses `argv` and runs it; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match commands::run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("fepkit: {e}");
            e.exit_code()
        }
    }
}
