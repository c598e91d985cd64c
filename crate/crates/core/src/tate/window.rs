use std::collections::BTreeMap;

use crate::bgg::g_module;
use crate::error::{ensure, Error, Result};
use crate::exactlin::{DenseMatrix, Field};
use crate::homalg::{resolve_module, ExtModules, FreeComplex, FreeModule, GradedMatrix, HilbertData, ModulePresentation};
use crate::perturb::FilteredMinimalComplex;
use crate::rings::{GradedMap, GradedModule, RingElem};
use crate::sheaf::{table_from_ext, CohomologyTable};

/// Positions `lo..=hi` of the Tate resolution of M̃, classes = strand index i
/// (a summand ⋀(V*)(p-i) in position p).
#[derive(Clone, Debug)]
pub struct TateWindow<K: Field> {
    pub window: FilteredMinimalComplex<K>,
    pub lo: i64,
    pub hi: i64,
    /// tail degree: positions ≥ m are G(M_{≥m})
    pub m: i64,
    pub n: usize,
    /// positions `lo-1..=m+1`; position lo-1 is the truncation of the resolution
    pub full: FreeComplex<K>,
    pub module: ModulePresentation<K>,
    /// Krull dimension of Ext^{n-i}(M, ω_S), the dual of H^i_* M̃, for i = 0..=n
    pub ext_krull: Vec<i64>,
}

/// Strand of a generator of internal degree g in position p: ⋀(V*)(p-i) has generator
/// degree -(p-i)-n-1.
pub fn strand_of(n: usize, p: i64, g: i64) -> i64 {
    g + p + n as i64 + 1
}

/// Kernel of `d: C^p → C^{p+1}` as a submodule of the full Λ-module C^p.
pub fn kernel_module<K: Field>(d: &GradedMatrix<K>) -> Result<(GradedModule<K>, GradedMap<K>)> {
    let src = d.source();
    let fm = src.full_module()?;
    let bases: BTreeMap<i64, DenseMatrix<K>> = fm.degrees().map(|e| (e, d.slice(e).kernel_basis())).collect();
    fm.submodule(&bases)
}

/// The map from a free module whose generators go to the given vectors (of `target_full`
/// in the basis of `target`), as a graded matrix.
fn map_on_generators<K: Field>(
    p0: &FreeModule<K>,
    target: &FreeModule<K>,
    images: impl Fn(usize, i64) -> Vec<K::Elem>,
) -> Result<GradedMatrix<K>> {
    let mut entries = vec![RingElem::zero(); target.rank() * p0.rank()];
    for (j, g) in p0.gens().iter().enumerate() {
        for (i, e) in target.vector_to_elems(*g, &images(j, *g)).into_iter().enumerate() {
            entries[i * p0.rank() + j] = e;
        }
    }
    GradedMatrix::new(p0, target, entries)
}

/// Lowest nonzero degree of Ext^j(M, ω_S), if any.
fn lowest_degree<K: Field>(ext: &ExtModules<K>, j: i64) -> Result<Option<i64>> {
    Ok(ext.presentation(j)?.minimal()?.gens().min_gen())
}

/// Tail degree: above all intermediate cohomology h^i(F(m-i)), i > 0, and above the
/// degrees where M differs from H⁰_* M̃.
fn tail_degree<K: Field>(ext: &ExtModules<K>, hi: i64) -> Result<i64> {
    let n = ext.n() as i64;
    let mut m = hi;
    for i in 1..=n {
        if let Some(g) = lowest_degree(ext, n - i)? {
            m = m.max(i - g);
        }
    }
    for j in [n, n + 1] {
        if let Some(g) = lowest_degree(ext, j)? {
            m = m.max(-g);
        }
    }
    Ok(m + 1)
}

/// Tate resolution of M̃ on positions `lo..=hi`: the linear tail G(M_{≥m}) above the
/// regularity, and a minimal free Λ-resolution of Z^m = ker(I^m → I^{m+1}) to the left.
pub fn tate_window<K: Field>(module: &ModulePresentation<K>, lo: i64, hi: i64) -> Result<TateWindow<K>> {
    ensure(lo < hi, || format!("empty Tate window {lo}..{hi}"))?;
    let ring = module.ring();
    let n = ring.n();
    let ext = ExtModules::new(module)?;
    let top = ext.presentation(n as i64 + 1)?;
    if HilbertData::of(&top)?.krull_dim > 0 {
        return Err(Error::InvalidInput("H⁰_* of the sheaf is not finitely generated".into()));
    }
    let ext_krull = (0..=n)
        .map(|i| Ok(HilbertData::of(&ext.presentation((n - i) as i64)?)?.krull_dim))
        .collect::<Result<Vec<_>>>()?;
    let m = tail_degree(&ext, hi)?;
    let tail = g_module(&module.graded_module(m, m + 1)?, m, m + 1)?;
    let d_tail = tail.diff(m)?;
    let (z, incl) = kernel_module(&d_tail)?;
    let steps = (m - lo + 1) as usize;
    let res = resolve_module(&z, steps)?;
    let rc = &res.complex;
    let p0 = rc.term(0)?;
    let i_m = tail.term(m)?;
    let glue = map_on_generators(&p0, &i_m, |j, g| {
        let col = p0.basis(g).iter().position(|(jj, mono)| *jj == j && mono.degree() == 0).expect("generator present");
        incl.get(g).unwrap().dot(res.augmentation.get(g).unwrap()).column(col)
    })?;
    let mut terms: Vec<FreeModule<K>> = rc.terms().to_vec();
    let mut diffs: Vec<GradedMatrix<K>> = rc.diffs().to_vec();
    terms.push(i_m);
    terms.push(tail.term(m + 1)?);
    diffs.push(glue);
    diffs.push(d_tail);
    let full = FreeComplex::new(&ring.dual_ring(), lo - 1, terms, diffs, false)?;
    ensure(full.is_minimal(), || "Tate window is not minimal".into())?;
    let classes = (lo..=hi)
        .map(|p| {
            let cl: Vec<i64> = full.term(p)?.gens().iter().map(|&g| strand_of(n, p, g)).collect();
            ensure(cl.iter().all(|&i| (0..=n as i64).contains(&i)), || format!("generator outside the strands at position {p}"))?;
            Ok(cl)
        })
        .collect::<Result<Vec<_>>>()?;
    let window = FilteredMinimalComplex { complex: full.window(lo, hi)?.with_bounded(false), classes, contraction: None };
    window.check_filtration()?;
    Ok(TateWindow { window, lo, hi, m, n, full, module: module.clone(), ext_krull })
}

impl<K: Field> TateWindow<K> {
    /// c_{p,i}: number of summands ⋀(V*)(p-i) in position p.
    pub fn strand_count(&self, p: i64, i: usize) -> usize {
        self.window.classes_at(p).iter().filter(|&&c| c == i as i64).count()
    }

    /// Homology dimensions at each interior position, nonzero entries only.
    pub fn interior_homology(&self) -> Result<BTreeMap<i64, BTreeMap<i64, usize>>> {
        let mut out = BTreeMap::new();
        for p in self.lo..=self.hi {
            if p + 1 > self.full.hi() {
                continue;
            }
            let h = self.full.homology_all(p)?;
            if !h.is_empty() {
                out.insert(p, h);
            }
        }
        Ok(out)
    }

    /// The cohomology table computed directly from Ext, on the columns of the strand table.
    pub fn cohomology_table(&self) -> Result<CohomologyTable> {
        self.cohomology_table_range(self.lo - self.n as i64, self.hi)
    }

    pub fn cohomology_table_range(&self, d_lo: i64, d_hi: i64) -> Result<CohomologyTable> {
        let ext = ExtModules::new(&self.module)?;
        table_from_ext(&self.module, &ext, d_lo, d_hi)
    }
}

/// h^i(F(d)) = c_{d+i, i}, known where position d+i lies in the window.
pub fn strand_table<K: Field>(t: &TateWindow<K>) -> CohomologyTable {
    let mut out = CohomologyTable::empty(t.n, t.lo - t.n as i64, t.hi);
    for i in 0..=t.n {
        for d in out.d_lo..=out.d_hi {
            let p = d + i as i64;
            if p >= t.lo && p <= t.hi {
                out.set(i, d, Some(t.strand_count(p, i)));
            }
        }
    }
    out
}
