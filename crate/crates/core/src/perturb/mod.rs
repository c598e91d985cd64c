//! Contractions, cancellation, splitting complexes and the basic perturbation lemma.

mod bpl;
mod cancel;
mod contraction;
mod double;
mod operator;
mod split;

pub use bpl::bpl;
pub use cancel::{cancel, cancel_unchecked, minimize, unit_splits, TermSplit};
pub use contraction::{normalize, Contraction, Identity};
pub use double::{minimalize_double, row_homology_dims, truncate_rows, FilteredMinimalComplex};
pub use operator::Operator;
pub use split::split_contraction;
