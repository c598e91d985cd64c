//! Tate resolutions of sheaves, their strands, Horrocks–Trautmann complexes and
//! Eilenberg–MacLane fixtures.

mod em;
mod ht;
mod kernel;
mod window;

pub use em::{em_sheaf, EmSheaf};
pub use ht::{ht_complex, ht_conditions, ht_from_strand, HTComplex, HtNormalForm, HtReport};
pub use kernel::{kernel_module_check, KernelReport, KernelRow};
pub use window::{kernel_module, strand_of, strand_table, tate_window, TateWindow};
