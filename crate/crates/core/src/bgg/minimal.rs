use super::complex::ModuleComplex;
use super::functors::{f_double, g_double};
use crate::error::Result;
use crate::exactlin::Field;
use crate::perturb::{minimalize_double, FilteredMinimalComplex};

/// Minimal model of F(N•): a contraction of the total complex onto a minimal complex
/// whose generators carry the column index p as filtration class.
pub fn minimalize_f<K: Field>(c: &ModuleComplex<K>) -> Result<FilteredMinimalComplex<K>> {
    minimalize_double(&f_double(c)?)
}

/// Minimal model of G(M•) on positions `lo..=hi`. One extra position on each side is
/// computed and discarded, since truncated rows distort the ends.
pub fn minimalize_g<K: Field>(c: &ModuleComplex<K>, lo: i64, hi: i64) -> Result<FilteredMinimalComplex<K>> {
    let full = minimalize_double(&g_double(c, lo - 1, hi + 1)?)?;
    cut(&full, lo, hi)
}

/// Positions `lo..=hi` of a filtered minimal complex, as an unbounded window.
pub fn cut<K: Field>(m: &FilteredMinimalComplex<K>, lo: i64, hi: i64) -> Result<FilteredMinimalComplex<K>> {
    let complex = super::functors::pad(&m.complex, m.complex.ring(), lo.min(m.complex.lo()), hi.max(m.complex.hi()))?
        .window(lo, hi)?
        .with_bounded(false);
    let classes = (lo..=hi).map(|t| m.classes_at(t).to_vec()).collect();
    Ok(FilteredMinimalComplex { complex, classes, contraction: None })
}
