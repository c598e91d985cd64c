//! Polynomial and exterior algebras, and graded modules given by action matrices.

mod module;
mod ring;

pub use module::{generated_submodule, hom_basis, GradedMap, GradedModule};
pub use ring::{binomial, Monomial, Ring, RingElem, RingKind};
