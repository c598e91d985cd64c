//! Exact computations around the BGG correspondence on projective space:
//! BGG functors, minimal resolutions over S and Λ, contractions and the basic
//! perturbation lemma, sheaf cohomology tables, Tate resolutions and
//! Horrocks–Trautmann complexes.

pub mod bgg;
pub mod error;
pub mod exactlin;
pub mod homalg;
pub mod perturb;
pub mod random;
pub mod rings;
pub mod sheaf;
pub mod tate;

pub use error::{Error, Result};
