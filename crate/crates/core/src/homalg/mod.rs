//! Graded free modules, complexes, resolutions, Ext and Hilbert data.

mod complex;
mod ext;
mod free;
mod lambda;
mod presentation;

pub use complex::{BettiTable, ChainMap, DoubleComplex, FreeComplex, TotLayout};
pub use ext::{dual_resolution, ExtModules, HilbertData, Laurent};
pub use free::{FreeModule, GradedMatrix};
pub use lambda::{free_cover, resolve_module, ModuleResolution};
pub use presentation::{
    complex_homology, hilbert_function, homology_presentation, image_generators, kernel_generators,
    presentation_from_resolution, regularity, resolve, ModulePresentation,
};

/// The contraction module as a Λ-module complex term, re-exported for convenience.
pub use crate::rings::GradedModule;
