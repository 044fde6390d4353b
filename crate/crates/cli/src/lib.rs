//! The `scootfuse` command-line tool and calibration HTTP service.

pub mod args;
pub mod commands;
pub mod error;
pub mod server;

use clap::error::ErrorKind;
use clap::Parser;

/// Parses `argv`, runs the command and returns the process exit code.
/// Diagnostics go to standard error.
pub fn main_with_args<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => error::EXIT_OK,
                _ => error::EXIT_USAGE,
            };
        }
    };
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
