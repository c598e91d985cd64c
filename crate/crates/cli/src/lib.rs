//! Batch front end: JSON input documents, command dispatch and table/JSON rendering.

pub mod input;
pub mod run;

pub use input::{parse_input, Algebra, Coeff, ComplexSpec, InputDocument, InputError, ModuleSpec, RingSpec, Term};
pub use run::{execute, run, Command, Format, Output, RunConfig, RunError, Window, PRIME_ENV};
