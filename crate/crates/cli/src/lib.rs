//! Command-line runner for the verification suites.

pub mod config;
pub mod output;
pub mod suites;

use std::path::Path;
use std::time::Instant;

use clap::Parser;
use thiserror::Error;

use schrogeo_core::report::VerificationReport;

pub use config::{Cli, Format, RunConfig, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ERROR: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_FAIL: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

/// 3 if any record is an ERROR, else 5 if any FAILs, else 0.
pub fn exit_code_for(report: &VerificationReport) -> i32 {
    let s = report.summary();
    if s.errors > 0 {
        EXIT_ERROR
    } else if s.failed > 0 {
        EXIT_FAIL
    } else {
        EXIT_OK
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    use std::io::Write;
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

/// Parses `args`, runs the suite and writes the report; returns the exit
/// code. Diagnostics and wall-clock time go to stderr.
pub fn main_with_args<I, T>(args: I, env_seed: Option<String>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let config = match RunConfig::resolve(&cli, env_seed.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("schrogeo: {e}");
            return e.exit_code();
        }
    };
    let start = Instant::now();
    let report = suites::run(&config);
    let text = output::render(&config, &report);
    if let Err(e) = write_out(cli.out.as_deref(), &text) {
        eprintln!("schrogeo: {e}");
        return e.exit_code();
    }
    let s = report.summary();
    eprintln!(
        "schrogeo {}: {} checks, {} failed, {} errors in {:.2} s",
        config.suite.name(),
        s.total,
        s.failed,
        s.errors,
        start.elapsed().as_secs_f64()
    );
    exit_code_for(&report)
}
