//! Command-line front end for the `singmin` library.
//!
//! [`run`] executes one command and returns its exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | invalid parameters, unreadable input or bad usage |
//! | 3 | numerical failure |
//! | 4 | a bound check failed |

pub mod args;
mod batch;
mod commands;

use std::io::Write;

use clap::error::ErrorKind;

pub use args::{parse_args, parse_grid, split_scenario_line, Cli, Command};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_BOUND_FAILED: i32 = 4;

/// Result of a command that ran to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    /// One line describing the result, used in batch summaries.
    pub summary: String,
}

impl Outcome {
    fn ok(summary: String) -> Self {
        Outcome { code: EXIT_OK, summary }
    }
}

/// A command that stopped early.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_NUMERIC,
            message: message.into(),
        }
    }
}

impl From<singmin::Error> for Failure {
    fn from(e: singmin::Error) -> Self {
        let code = if e.is_invalid_input() { EXIT_USAGE } else { EXIT_NUMERIC };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn pool(threads: usize) -> Result<rayon::ThreadPool, Failure> {
    if threads == 0 {
        return Err(Failure::usage("--jobs must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::usage(format!("cannot start {threads} threads: {e}")))
}

/// Executes a parsed command, writing human-readable output to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<Outcome, Failure> {
    let v = cli.verbose;
    match &cli.command {
        Command::Profile(c) => commands::profile(c, v, out),
        Command::Solve(c) => commands::solve(c, v, out),
        Command::Mesh(c) => commands::mesh_cmd(c, v, out),
        Command::Verify(c) => commands::verify(c, v, out),
        Command::Threshold(c) => commands::threshold(c, v, out),
        Command::Batch(b) => batch::run_batch(b, v, out),
    }
}

/// Parses `args` (without the program name), runs the command and returns
/// the exit code. Usage and error messages are written to `out` too.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match parse_args(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match execute(&cli, out) {
        Ok(o) => o.code,
        Err(f) => {
            let _ = writeln!(out, "error: {}", f.message);
            f.code
        }
    }
}
