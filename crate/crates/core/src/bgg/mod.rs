//! BGG functors.

mod complex;
mod functors;

pub use complex::{check_chain_map, map_in_degree, ModuleComplex};
pub use functors::{f_chain_map, f_complex, f_double, f_map, f_module, g_complex, g_double, g_module, wedge_term};
mod resolution;

pub use resolution::{cofree_extension, gf_resolution, homology_table, left_resolution, socle_sign, GfResolution};
mod certificates;
mod minimal;

pub use certificates::{f_dual_certificate, g_dual_certificate, wedge_duality, GDualCertificate};
pub use minimal::{cut, minimalize_f, minimalize_g};
