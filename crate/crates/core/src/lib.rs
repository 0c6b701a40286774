//! Exact-arithmetic computations with functors on finitely generated free
//! groups at a fixed truncation degree.
//!
//! The crate models the Passi functors by truncated tensor algebras, the
//! Mal'cev functors by truncated free Lie algebras acting through the
//! Baker-Campbell-Hausdorff series, the linear PROP `Cat Lie` with its
//! truncations, the tower of categories obtained by truncating the
//! linearization of the category of free groups, and the Casimir PROP of
//! open Jacobi diagrams modulo AS and IHX.
//!
//! All arithmetic is over the rationals and exact.

pub mod catprop;
pub mod freealg;
pub mod freelie;
pub mod grfun;
pub mod jacobi;
pub mod qlinalg;
pub mod sample;
pub mod tower;
pub mod verify;

pub use qlinalg::{Rational, SparseMatrix};
