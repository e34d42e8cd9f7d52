//! Quadratic Dirichlet character sums and mean values of completely
//! multiplicative functions, with the scans and audits built on them.
//!
//! - [`arith`]: sieves, smallest-prime-factor tables, Jacobi symbol, Liouville function.
//! - [`characters`]: real primitive characters of odd squarefree modulus.
//! - [`sums`]: partial sums, means, logarithmic means and related bounds.
//! - [`experiments`]: end-to-end audits and scans.

pub mod arith;
pub mod characters;
pub mod error;
pub mod experiments;
pub mod sums;

pub use characters::{legendre_character, product_character, Parity, QuadraticCharacter};
pub use error::{Error, Result};
