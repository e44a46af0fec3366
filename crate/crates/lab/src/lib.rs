//! Command-line front end: argument and config handling, the `psi`,
//! `print-chain`, `check` and `search` commands, and report writing.
//!
//! Every command returns an [`Outcome`] holding its exit code and the text it
//! would print, so the binary and the tests drive the same code path.
//! Exit codes: 0 when expectations hold, 1 when a mathematical expectation is
//! violated, 2 on usage or configuration errors.

pub mod chains;
pub mod check;
pub mod cli;
pub mod config;
pub mod report;
pub mod search;

use loewner_core::chain::ChainError;
use loewner_core::verifier::VerifierError;
use loewner_core::SpectralError;

pub use cli::{run, Cli};
pub use config::LabConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Verifier(#[from] VerifierError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

impl LabError {
    pub(crate) fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        LabError::Io(format!("{}: {e}", path.display()))
    }
}

/// Exit code and captured output of one command.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    pub fn ok(stdout: String) -> Self {
        Self {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    pub fn with_code(code: i32, stdout: String) -> Self {
        Self {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: message.into(),
        }
    }
}

impl From<LabError> for Outcome {
    fn from(e: LabError) -> Self {
        Outcome::usage(format!("error: {e}\n"))
    }
}
