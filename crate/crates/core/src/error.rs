//! Error type shared by every module in this crate.

use thiserror::Error;

/// Everything that can go wrong inside the library.
///
/// `Domain` covers precondition violations on user-supplied parameters;
/// the other variants are specific failure modes that callers may want to
/// branch on (search exhaustion and iterative non-convergence map to
/// distinct process exit codes in the CLI).
#[derive(Debug, Error)]
pub enum FrameError {
    /// A parameter violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two values that must agree (dimensions, field contexts) did not.
    #[error("mismatch: {0}")]
    Mismatch(String),

    /// A column that must be normalizable had (near-)zero norm.
    #[error("column {index} has norm below 1e-14 and cannot be normalized")]
    ZeroColumn { index: usize },

    /// A randomized selection came out empty; retry with another seed.
    #[error("random row selection was empty; retry with a different seed")]
    EmptySelection,

    /// A randomized search used up its trial budget without success.
    #[error("search exhausted {trials} trials without meeting the target")]
    SearchExhausted { trials: usize },

    /// An iterative method hit its iteration cap.
    #[error("iteration failed to converge within {iterations} iterations (last estimate {last})")]
    NonConvergence { iterations: usize, last: f64 },

    /// A least-squares subproblem was too ill-conditioned to trust.
    #[error("selected columns are rank-deficient (relative singular value below 1e-10)")]
    IllConditioned { support: Vec<usize> },

    /// An internal consistency check failed; indicates a bug or corrupted state.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, FrameError>;
