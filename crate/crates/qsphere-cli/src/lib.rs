//! Command-line surface, JSON formats, configuration, and verification
//! suites for the quantum-sphere engine in `qsphere-core`.
//!
//! The library side exists so that integration tests (and other tooling)
//! can drive the verification suites in-process; the `qs` binary is a thin
//! wrapper over [`commands::run`].

pub mod commands;
pub mod config;
pub mod json;
pub mod suites;

use std::fmt;

/// Exit code for mathematical "negative" verdicts (violated relations,
/// stalled descents, non-unitary elements, failed suites): distinct from
/// usage errors so shell pipelines can branch on the verdict.
pub const EXIT_VERDICT: i32 = 1;
/// Exit code for usage, parse, IO, and configuration errors.
pub const EXIT_USAGE: i32 = 2;

/// Errors on the tool surface: everything here maps to exit code 2; the
/// mathematical verdicts are ordinary command results, not errors.
#[derive(Debug)]
pub enum CliError {
    /// An engine-domain error (parse failure, arity/mode mismatch, …).
    Core(qsphere_core::Error),
    Io(std::io::Error),
    Json(serde_json::Error),
    /// Anything else wrong with how the tool was invoked or configured.
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Json(e) => write!(f, "{e}"),
            CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qsphere_core::Error> for CliError {
    fn from(e: qsphere_core::Error) -> CliError {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> CliError {
        CliError::Json(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
