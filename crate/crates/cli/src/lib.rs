//! Command-line front end for `ricalc`.
//!
//! [`run`] parses arguments, dispatches to a command and maps the outcome to
//! the exit-code contract: 0 success, 1 failed verification or comparison,
//! 2 invalid input.

pub mod args;
pub mod checks;
mod commands;
mod format;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::Cli;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, unreadable or malformed files.
    Input(String),
    /// A computation that could not be completed.
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Runtime(_) => EXIT_FAILED,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<ricalc_core::Error> for CliError {
    fn from(e: ricalc_core::Error) -> Self {
        use ricalc_core::Error as E;
        match e {
            E::NonConvergence { .. } | E::Numeric(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// Rendered command output plus whether every check in it passed.
pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let to_stdout = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let rendered = e.render();
            let _ = if to_stdout {
                write!(stdout, "{rendered}")
            } else {
                write!(stderr, "{rendered}")
            };
            return if to_stdout { EXIT_OK } else { EXIT_INPUT };
        }
    };
    match commands::dispatch(&cli, stderr) {
        Ok(outcome) => {
            let written = match &cli.output {
                Some(path) => std::fs::write(path, &outcome.text)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => stdout
                    .write_all(outcome.text.as_bytes())
                    .map_err(|e| e.to_string()),
            };
            if let Err(msg) = written {
                let _ = writeln!(stderr, "error: {msg}");
                return EXIT_INPUT;
            }
            if outcome.passed {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
