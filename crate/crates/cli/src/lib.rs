//! Serialization and reporting layers behind the `frame-forge` binary.
//!
//! Kept as a library so the file format and report assembly can be tested
//! against the exact bytes the binary produces.

pub mod framefile;
pub mod report;

use frame_forge_core::FrameError;

/// Process-level failure, carrying the exit status the binary must return:
/// 1 for usage and I/O problems, 2 when a randomized search exhausts its
/// trial budget, 3 when an iterative numerical routine fails to converge.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Search(String),
    NonConvergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Search(_) => 2,
            CliError::NonConvergence(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(s) | CliError::Io(s) | CliError::Search(s) | CliError::NonConvergence(s) => s,
        }
    }
}

impl From<FrameError> for CliError {
    fn from(e: FrameError) -> Self {
        match e {
            FrameError::NonConvergence { .. } => CliError::NonConvergence(e.to_string()),
            FrameError::SearchExhausted { .. } => CliError::Search(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.message())
    }
}

impl std::error::Error for CliError {}
