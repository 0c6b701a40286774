//! Exact rational scalars and sparse linear algebra over indexed bases.
//!
//! Every dimension computed elsewhere in the crate reduces to a rank or a
//! kernel here. Elimination is fraction-free: rows are scaled to primitive
//! integer vectors and combined by cross-multiplication, with the pivot in
//! each column chosen as the candidate of smallest bit length.

mod matrix;
mod rational;

pub use matrix::{
    joint_kernel, joint_kernel_dim, kernel_basis, rank, rank_of, IndexedBasis, RowSpace,
    SparseMatrix, SparseVec, Subspace,
};
pub use rational::{q, ParseRationalError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected} columns, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("duplicate basis key at position {0}")]
    DuplicateKey(usize),
}
