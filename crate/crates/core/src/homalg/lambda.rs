use std::collections::BTreeMap;

use super::complex::FreeComplex;
use super::free::{FreeModule, GradedMatrix};
use crate::error::{ensure, Error, Result};
use crate::exactlin::{DenseMatrix, Field};
use crate::rings::{GradedMap, GradedModule, RingElem, RingKind};

/// A minimal free resolution over Λ (or any finite-dimensional graded algebra
/// given by action matrices), `P^{-k} → … → P^0 → N`.
#[derive(Clone, Debug)]
pub struct ModuleResolution<K: Field> {
    /// positions `-(steps-1)..=0`
    pub complex: FreeComplex<K>,
    /// P^0 → N degreewise, in the bases of `FreeModule::basis`
    pub augmentation: GradedMap<K>,
    /// kernel of the leftmost differential, with its inclusion into the leftmost term
    pub last_kernel: GradedModule<K>,
    pub last_inclusion: GradedMap<K>,
}

/// Free cover of a complete module by its minimal generators.
/// Returns the free module and the degreewise map onto the module.
pub fn free_cover<K: Field>(n: &GradedModule<K>) -> Result<(FreeModule<K>, GradedMap<K>)> {
    let ring = n.ring();
    let f = ring.field();
    let gens = n.minimal_generators()?;
    let free = FreeModule::new(ring, gens.iter().map(|(d, _)| *d).collect());
    let mut maps = BTreeMap::new();
    let span = free.degree_span();
    if let Some((lo, hi)) = span {
        for d in lo..=hi {
            let basis = free.basis(d);
            let mut m = DenseMatrix::zeros(f, n.dim(d), basis.len());
            for (c, (j, mono)) in basis.iter().enumerate() {
                let (gd, v) = &gens[*j];
                let img = n.act_monomial(mono, *gd)?.mul_vec(v)?;
                for (r, x) in img.into_iter().enumerate() {
                    m.set(r, c, x);
                }
            }
            maps.insert(d, m);
        }
    }
    Ok((free, GradedMap { maps }))
}

/// Kernel of a surjection from a free module onto a module, as a submodule of the free module.
fn kernel_of<K: Field>(free: &FreeModule<K>, eps: &GradedMap<K>) -> Result<(GradedModule<K>, GradedMap<K>)> {
    let fm = free.full_module()?;
    let mut bases = BTreeMap::new();
    for d in fm.degrees() {
        let k = match eps.get(d) {
            Some(m) => m.kernel_basis(),
            None => DenseMatrix::identity(free.field(), free.dim(d)),
        };
        bases.insert(d, k);
    }
    fm.submodule(&bases)
}

/// Minimal free resolution of a complete module over Λ with `steps` free terms.
pub fn resolve_module<K: Field>(n: &GradedModule<K>, steps: usize) -> Result<ModuleResolution<K>> {
    let ring = n.ring();
    if ring.kind() == RingKind::Symmetric || !n.is_complete() {
        return Err(Error::Unsupported("module resolution needs a finite-dimensional module over Λ".into()));
    }
    if steps == 0 {
        return Err(Error::InvalidInput("at least one step".into()));
    }
    let (p0, aug) = free_cover(n)?;
    let (mut kmod, mut kincl) = kernel_of(&p0, &aug)?;
    let mut terms = vec![p0];
    let mut diffs: Vec<GradedMatrix<K>> = Vec::new();
    for _ in 1..steps {
        let (p, eps) = free_cover(&kmod)?;
        let prev = terms.last().unwrap().clone();
        // differential: p → kernel ⊂ prev
        let mut entries = vec![RingElem::zero(); prev.rank() * p.rank()];
        for (j, g) in p.gens().iter().enumerate() {
            let basis = p.basis(*g);
            let col = basis.iter().position(|(jj, m)| *jj == j && m.degree() == 0).expect("generator present");
            let v = kincl.get(*g).unwrap().dot(eps.get(*g).unwrap()).column(col);
            for (i, e) in prev.vector_to_elems(*g, &v).into_iter().enumerate() {
                entries[i * p.rank() + j] = e;
            }
        }
        diffs.push(GradedMatrix::new(&p, &prev, entries)?);
        let (km, ki) = kernel_of(&p, &eps)?;
        kmod = km;
        kincl = ki;
        terms.push(p);
    }
    terms.reverse();
    diffs.reverse();
    let lo = -(steps as i64) + 1;
    let complex = FreeComplex::new(ring, lo, terms, diffs, false)?;
    Ok(ModuleResolution { complex, augmentation: aug, last_kernel: kmod, last_inclusion: kincl })
}

impl<K: Field> ModuleResolution<K> {
    /// Checks exactness at every interior position, surjectivity onto N, minimality,
    /// and that the leftmost kernel matches the stored one.
    pub fn verify(&self, n: &GradedModule<K>) -> Result<()> {
        let c = &self.complex;
        ensure(c.is_minimal(), || "resolution is not minimal".into())?;
        for p in c.lo() + 1..0 {
            let h = c.homology_all(p)?;
            ensure(h.is_empty(), || format!("resolution not exact at position {p}"))?;
        }
        // H^0 = N: coker(d^{-1}) ≅ N via the augmentation
        let p0 = c.term(0)?;
        if let Some((lo, hi)) = p0.degree_span() {
            for d in lo..=hi {
                let eps = self.augmentation.get(d).unwrap();
                ensure(eps.rank() == n.dim(d), || format!("augmentation not onto in degree {d}"))?;
                if c.stores(-1) {
                    let din = c.diff(-1)?.slice(d);
                    ensure(eps.mul(&din)?.is_zero(), || format!("augmentation does not kill boundaries in degree {d}"))?;
                    ensure(din.rank() + n.dim(d) == p0.dim(d), || format!("H^0 differs from N in degree {d}"))?;
                }
            }
        }
        Ok(())
    }
}
