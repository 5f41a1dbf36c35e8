//! Vertex-sparsifier chains and sparsified block-Cholesky (U^T D U)
//! factorizations for SDDM and Laplacian matrices.
//!
//! The toolkit eliminates strongly diagonally dominant blocks, replaces
//! the resulting Schur complements with spectral vertex sparsifiers, and
//! uses the resulting chain either as a recursive preconditioner or as an
//! explicit sparse factorization. Every spectral claim is checkable at
//! desk scale against dense generalized-eigenvalue oracles.
//!
//! Module map:
//! - [`matrix`], [`schur`], [`loewner`]: representations, exact Schur
//!   complements, and the dense certification oracle.
//! - [`subsets`]: random strongly dominant elimination blocks.
//! - [`jacobi`]: truncated power-series block inverses.
//! - [`expanders`]: Ramanujan graphs and weighted demand-graph expanders.
//! - [`schur_sparsify`]: the spectral vertex sparsifier.
//! - [`sparsify`]: effective-resistance edge sampling.
//! - [`chain`], [`factor`]: chain construction, the solver operator, and
//!   conversion to U^T D U form.
//! - [`solver`]: eps-accurate solves by preconditioned refinement.

pub mod chain;
pub mod dense;
pub mod error;
pub mod expanders;
pub mod factor;
pub mod generate;
pub mod io;
pub mod jacobi;
pub mod lanczos;
pub mod loewner;
pub mod matrix;
pub mod rng;
pub mod schur;
pub mod schur_sparsify;
pub mod solver;
pub mod sparsify;
pub mod subsets;

pub use error::{Error, Result};
pub use loewner::{loewner_approx_check, LoewnerReport};
pub use matrix::{validate_sddm, IndexPartition, MatrixKind, SddmMatrix, XlDecomposition};
pub use schur::exact_schur;
