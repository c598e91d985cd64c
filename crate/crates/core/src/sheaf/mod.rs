//! Sheaf cohomology through graded modules: cohomology tables, the splitting
//! criterion, Horrocks complexes and Horrocks resolutions.

mod horrocks;
mod table;

pub use horrocks::{horrocks_resolution, horrocks_split_check, is_horrocks_complex, stabilize, HorrocksReport, SplitVerdict};
pub use table::cohomology_table;
pub(crate) use table::table_from_ext;
pub use table::CohomologyTable;
