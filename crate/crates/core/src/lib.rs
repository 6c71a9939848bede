//! Koszulness computations for commutative algebra objects over the downward
//! Brauer categories.
//!
//! The crate builds the algebra objects `Z_n`, `E_n` and `E₁/(κ_{e²})`, their
//! Harrison complexes, the red-and-black graph complexes that model them, the
//! realization functor to `Sp_{2g}`-representations, and the quadratic
//! presentation of the Torelli Lie algebra. Every homology group is computed
//! exactly over ℚ through [`exactla`].

pub mod brauer;
pub mod graphcx;
pub mod harrison;
mod perm;
pub mod realize;
pub mod repchar;
pub mod species;
pub mod torelli;
pub mod verify;

pub use perm::{permutation_sign, permutations, shuffles};
