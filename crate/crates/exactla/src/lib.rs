//! Exact linear algebra over ℚ for sparse combinatorial matrices.
//!
//! Everything here is exact: ranks come from fraction-free elimination on
//! integer-scaled rows, kernels from reduced echelon forms over
//! [`BigRational`]. Modular ranks are available as a cheap cross-check but are
//! never used as a substitute for the rational answer.

mod complex;
mod echelon;
mod elim;
mod error;
mod format;
mod matrix;
mod modular;

pub use complex::{mapping_cone, ChainComplex, ChainMap, Grading, HomologyTable};
pub use echelon::{nullspace_basis, Echelon};
pub use elim::{rank, rank_of_rows};
pub use error::{ExactlaError, Result};
pub use format::{parse_matrix, write_matrix, FORMAT_TAG};
pub use matrix::{RationalSparseMatrix, SparseVec};
pub use modular::{modular_check, rank_mod_p, ModularReport, PrimeResult};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

/// Shorthand for an arbitrary-precision rational.
pub type Q = BigRational;

/// Builds the rational `n/1`.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}
