//! Error types shared across the crate.

/// Errors produced by construction, evaluation, and the iterative solvers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Incompatible matrix or vector dimensions.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A structure map or family failed a construction invariant.
    #[error("invalid construction: {0}")]
    Construction(String),

    /// A precondition of an algorithm was violated (e.g. unstable base
    /// matrix for a stability-radius run).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The conic subproblem solver did not return a usable solution.
    #[error("conic solver failure: {0}")]
    Solver(String),

    /// A dense linear-algebra routine (SVD, eigendecomposition) failed.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An input is too large for an exact/enumerative routine.
    #[error("instance too large: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
