use std::collections::BTreeMap;

use super::complex::FreeComplex;
use super::free::{FreeModule, GradedMatrix};
use crate::error::{Error, Result};
use crate::exactlin::{DenseMatrix, Field, Quotient};
use crate::rings::{GradedModule, Ring, RingElem, RingKind};

/// Cokernel of a map of graded free modules (relations → generators).
#[derive(Clone, Debug, PartialEq)]
pub struct ModulePresentation<K: Field> {
    rels: GradedMatrix<K>,
}

impl<K: Field> ModulePresentation<K> {
    pub fn new(rels: GradedMatrix<K>) -> Self {
        ModulePresentation { rels }
    }

    pub fn free(gens: &FreeModule<K>) -> Self {
        Self::new(GradedMatrix::zero(&FreeModule::zero(gens.ring()), gens))
    }

    pub fn zero(ring: &Ring<K>) -> Self {
        Self::free(&FreeModule::zero(ring))
    }

    /// Quotient of the free module on `gens` by the ideal-style relations given as columns.
    pub fn from_columns(gens: &FreeModule<K>, cols: Vec<Vec<RingElem<K>>>) -> Result<Self> {
        let ring = gens.ring();
        let mut degs = Vec::new();
        for c in &cols {
            let deg = c
                .iter()
                .zip(gens.gens())
                .find(|(e, _)| !e.is_zero())
                .map(|(e, g)| e.degree().unwrap() as i64 + g);
            degs.push(deg.unwrap_or(0));
        }
        let src = FreeModule::new(ring, degs);
        let mut entries = vec![RingElem::zero(); gens.rank() * cols.len()];
        for (j, c) in cols.into_iter().enumerate() {
            for (i, e) in c.into_iter().enumerate() {
                entries[i * src.rank() + j] = e;
            }
        }
        Ok(Self::new(GradedMatrix::new(&src, gens, entries)?))
    }

    pub fn ring(&self) -> &Ring<K> {
        self.rels.ring()
    }
    pub fn field(&self) -> &K {
        self.ring().field()
    }
    pub fn gens(&self) -> &FreeModule<K> {
        self.rels.target()
    }
    pub fn relations(&self) -> &GradedMatrix<K> {
        &self.rels
    }

    /// The degree-d piece as a quotient of the generators' degree-d piece.
    pub fn piece(&self, d: i64) -> Quotient<K> {
        Quotient::new(self.field(), &self.rels.slice(d))
    }

    pub fn dim(&self, d: i64) -> usize {
        let g = self.gens().dim(d);
        if g == 0 {
            return 0;
        }
        g - self.rels.slice(d).rank()
    }

    /// Module structure on degrees `lo..=hi` (a slice unless the module is known to vanish outside).
    pub fn graded_module(&self, lo: i64, hi: i64) -> Result<GradedModule<K>> {
        let f = self.field();
        let pieces: Vec<Quotient<K>> = (lo..=hi).map(|d| self.piece(d)).collect();
        let dims = pieces.iter().map(|q| q.dim()).collect();
        let ring = self.ring();
        let mut action = vec![Vec::new(); ring.nvars()];
        for (i, fam) in action.iter_mut().enumerate() {
            let x = ring.var(i);
            for (k, d) in (lo..hi).enumerate() {
                let m = self.gens().mult_map(&x, d)?;
                fam.push(pieces[k + 1].projection.dot(&m).dot(&pieces[k].section(f)));
            }
        }
        GradedModule::new(ring, lo, dims, action, ring.kind() != RingKind::Symmetric)
    }

    pub fn twist(&self, a: i64) -> Self {
        Self::new(self.rels.twist_modules(a))
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let r = GradedMatrix::from_blocks(
            &[self.rels.source().clone(), other.rels.source().clone()],
            &[self.gens().clone(), other.gens().clone()],
            &[vec![Some(self.rels.clone()), None], vec![None, Some(other.rels.clone())]],
        )?;
        Ok(Self::new(r))
    }

    /// Minimal presentation: no unit entries and minimal relations.
    pub fn minimal(&self) -> Result<Self> {
        let res = resolve(self)?;
        Ok(presentation_from_resolution(&res))
    }

    pub fn is_zero(&self) -> Result<bool> {
        Ok(self.minimal()?.gens().is_zero())
    }
}

/// The presentation read off positions -1 → 0 of a resolution.
pub fn presentation_from_resolution<K: Field>(res: &FreeComplex<K>) -> ModulePresentation<K> {
    ModulePresentation::new(res.diff(-1).expect("resolution is bounded"))
}

/// Generators of a degreewise family of subspaces U_d ⊆ F_d closed under the
/// variables, over degrees `dmin..=` an adaptive bound. `u(d)` returns a basis as columns.
fn generators_of_family<K: Field>(
    f_mod: &FreeModule<K>,
    dmin: i64,
    initial_bound: i64,
    mut u: impl FnMut(i64) -> DenseMatrix<K>,
) -> Result<Vec<(i64, Vec<K::Elem>)>> {
    let ring = f_mod.ring();
    let field = ring.field();
    let nv = ring.nvars();
    let slack = 2;
    let mut bound = initial_bound;
    let mut prev: Option<DenseMatrix<K>> = None;
    let mut out = Vec::new();
    let mut d = dmin;
    while d <= bound + slack {
        let ud = u(d);
        let mut w = DenseMatrix::zeros(field, f_mod.dim(d), 0);
        if let Some(p) = &prev {
            if p.cols() > 0 {
                for i in 0..nv {
                    let xi = f_mod.mult_map(&ring.var(i), d - 1)?;
                    w = w.hstack(&xi.dot(p))?;
                }
            }
        }
        let wrank = w.rank();
        if wrank < ud.cols() {
            let r = w.hstack(&ud)?.rref();
            for &c in r.pivot_cols.iter().filter(|&&c| c >= w.cols()) {
                out.push((d, ud.column(c - w.cols())));
            }
            if d > initial_bound {
                bound = bound.max(d + ring.n() as i64 + 2);
            }
        }
        prev = Some(ud);
        d += 1;
    }
    Ok(out)
}

/// Map from a new free module onto the given vectors.
fn map_from_vectors<K: Field>(target: &FreeModule<K>, vecs: &[(i64, Vec<K::Elem>)]) -> Result<GradedMatrix<K>> {
    let src = FreeModule::new(target.ring(), vecs.iter().map(|(d, _)| *d).collect());
    let mut entries = vec![RingElem::zero(); target.rank() * src.rank()];
    for (j, (d, v)) in vecs.iter().enumerate() {
        for (i, e) in target.vector_to_elems(*d, v).into_iter().enumerate() {
            entries[i * src.rank() + j] = e;
        }
    }
    GradedMatrix::new(&src, target, entries)
}

/// Minimal generators of the kernel of a map of free S-modules, as a map into its source.
pub fn kernel_generators<K: Field>(phi: &GradedMatrix<K>) -> Result<GradedMatrix<K>> {
    let src = phi.source();
    let Some(dmin) = src.min_gen() else {
        return Ok(GradedMatrix::zero(&FreeModule::zero(src.ring()), src));
    };
    let bound = src.max_gen().unwrap() + src.ring().n() as i64 + 2;
    let gens = generators_of_family(src, dmin, bound, |d| phi.slice(d).kernel_basis())?;
    map_from_vectors(src, &gens)
}

/// Minimal generators of the image of a map of free S-modules.
pub fn image_generators<K: Field>(phi: &GradedMatrix<K>) -> Result<GradedMatrix<K>> {
    let tgt = phi.target();
    let src = phi.source();
    let Some(dmin) = src.min_gen() else {
        return Ok(GradedMatrix::zero(&FreeModule::zero(tgt.ring()), tgt));
    };
    let bound = src.max_gen().unwrap();
    let gens = generators_of_family(tgt, dmin, bound, |d| phi.slice(d).column_space())?;
    map_from_vectors(tgt, &gens)
}

/// Minimal free resolution over S, positions `-len..=0`.
pub fn resolve<K: Field>(m: &ModulePresentation<K>) -> Result<FreeComplex<K>> {
    let ring = m.ring();
    if ring.kind() != RingKind::Symmetric {
        return Err(Error::Unsupported("resolve expects a module over S".into()));
    }
    let mut maps = vec![m.relations().clone()];
    let cap = ring.n() + 4;
    loop {
        let k = kernel_generators(maps.last().unwrap())?;
        if k.source().is_zero() {
            break;
        }
        maps.push(k);
        if maps.len() > cap {
            return Err(Error::Invariant("resolution failed to terminate".into()));
        }
    }
    // drop a trailing zero module
    while maps.len() > 1 && maps.last().unwrap().source().is_zero() {
        maps.pop();
    }
    let len = maps.len() as i64;
    let mut terms: Vec<FreeModule<K>> = maps.iter().rev().map(|d| d.source().clone()).collect();
    terms.push(m.gens().clone());
    let diffs: Vec<GradedMatrix<K>> = maps.into_iter().rev().collect();
    let big = FreeComplex::new(ring, -len, terms, diffs, true)?;
    let c = crate::perturb::minimize(&big)?;
    let small = c.small.trimmed_left();
    if small.lo() < -(ring.n() as i64 + 1) {
        return Err(Error::Invariant("minimal resolution longer than n+1".into()));
    }
    Ok(small)
}

impl<K: Field> FreeComplex<K> {
    /// Drop zero terms on the left but keep position 0.
    pub fn trimmed_left(&self) -> Self {
        let mut lo = self.lo();
        while lo < 0 && self.term(lo).map(|t| t.is_zero()).unwrap_or(false) {
            lo += 1;
        }
        self.window(lo, self.hi().max(0)).expect("inside window").with_bounded(self.is_bounded())
    }
}

/// Presentation of ker(d_out)/im(d_in) at the middle module.
pub fn homology_presentation<K: Field>(d_in: &GradedMatrix<K>, d_out: &GradedMatrix<K>) -> Result<ModulePresentation<K>> {
    let k = kernel_generators(d_out)?;
    let syz = kernel_generators(&k)?;
    let lift = k
        .lift(d_in)?
        .ok_or_else(|| Error::Invariant("image not contained in kernel".into()))?;
    let rels = GradedMatrix::from_blocks(
        &[syz.source().clone(), lift.source().clone()],
        &[k.source().clone()],
        &[vec![Some(syz), Some(lift)]],
    )?;
    Ok(ModulePresentation::new(rels))
}

/// Homology presentation at position p of a bounded S-complex.
pub fn complex_homology<K: Field>(c: &FreeComplex<K>, p: i64) -> Result<ModulePresentation<K>> {
    homology_presentation(&c.diff(p - 1)?, &c.diff(p)?)
}

/// Castelnuovo–Mumford regularity from a minimal resolution: max over k of
/// (largest generator degree at position -k) - k. `None` for the zero module.
pub fn regularity<K: Field>(res: &FreeComplex<K>) -> Option<i64> {
    res.positions().filter_map(|p| res.term(p).ok()?.max_gen().map(|g| g + p)).max()
}

/// Degreewise dims of a presentation over `lo..=hi`.
pub fn hilbert_function<K: Field>(m: &ModulePresentation<K>, lo: i64, hi: i64) -> BTreeMap<i64, usize> {
    (lo..=hi).map(|d| (d, m.dim(d))).collect()
}
