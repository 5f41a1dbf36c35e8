//! Error type shared by the whole crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A matrix failed structural validation. The message names the first
    /// violated invariant with indices.
    #[error("invalid matrix: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// `M_FF` (or a grounded Laplacian block) is singular, typically because
    /// an eliminated set swallowed a whole connected component.
    #[error("singular block: {0}")]
    SingularBlock(String),

    /// The Las Vegas subset search did not produce a large enough set
    /// within its retry budget.
    #[error("subset retry budget exhausted after {rounds} rounds")]
    SubsetRetriesExhausted { rounds: usize },

    /// The matrix is too small for the requested partition or subset.
    #[error("matrix too small: {0}")]
    MatrixTooSmall(String),

    #[error("alpha = {alpha} below required minimum {min}")]
    AlphaTooSmall { alpha: f64, min: f64 },

    /// Materialization of a Jacobi operator (or a whole factorization)
    /// exceeded the caller-supplied nonzero budget.
    #[error("nnz budget exceeded at level {level}, row {row}: {nnz} > {budget}")]
    NnzBudgetExceeded {
        level: usize,
        row: usize,
        nnz: usize,
        budget: usize,
    },

    /// The two matrices of a Loewner comparison do not share a null space.
    #[error("null space mismatch: {0}")]
    NullSpaceMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Internal consistency check failed (e.g. a Cayley generator set of
    /// the wrong size). Indicates a bug or an invalid (p, q) pair.
    #[error("internal consistency failure: {0}")]
    Inconsistency(String),

    #[error("iteration did not converge after {iterations} steps (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
