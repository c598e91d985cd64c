//! Exact dense linear algebra over F_p and Q.

mod field;
mod matrix;

pub use field::{is_prime, Field, Fp, Rationals};
pub use matrix::{DenseMatrix, Quotient, Rref};
