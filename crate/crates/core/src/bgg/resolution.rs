use std::collections::BTreeMap;

use super::complex::ModuleComplex;
use super::functors::{f_complex, f_module, g_complex, wedge_term};
use crate::error::{ensure, Error, Result};
use crate::exactlin::{DenseMatrix, Field};
use crate::homalg::{FreeComplex, FreeModule};
use crate::rings::{GradedMap, GradedModule, Ring, RingKind};

/// The socle element 1 ∈ ⋀⁰V* of ⋀(V*)(a), as a multiple of e_0⋯e_n·g in the
/// free presentation with generator g.
pub fn socle_sign<K: Field>(l: &Ring<K>, a: i64) -> K::Elem {
    let n1 = l.n() as i64 + 1;
    l.field().pow_neg_one(a * n1 + n1 * (n1 - 1) / 2)
}

/// Extends a linear map `top: N_{-a} → W` (W = k^r, read as W ⊗ 1 ⊂ W ⊗ ⋀(V*)(a))
/// to the unique Λ-linear map N → W ⊗ ⋀(V*)(a), descending one degree at a time
/// by solving e_i·z = φ(e_i·x) for all i.
pub fn cofree_extension<K: Field>(n: &GradedModule<K>, a: i64, top: &DenseMatrix<K>) -> Result<GradedMap<K>> {
    let l = n.ring();
    ensure(l.kind() == RingKind::Exterior && n.is_complete(), || "cofree extension needs a complete Λ-module".into())?;
    let f = l.field();
    let r = top.rows();
    ensure(top.cols() == n.dim(-a), || "top component has the wrong width".into())?;
    let target = wedge_term(l, a, r).full_module()?;
    let mut maps = BTreeMap::new();
    if n.is_zero() {
        return Ok(GradedMap { maps });
    }
    // socle of each generator block: the single top monomial
    let mut at_top = DenseMatrix::zeros(f, target.dim(-a), n.dim(-a));
    let c = socle_sign(l, a);
    for i in 0..r {
        for j in 0..top.cols() {
            at_top.set(i, j, f.mul(&c, top.get(i, j)));
        }
    }
    if n.stores(-a) {
        maps.insert(-a, at_top);
    }
    let mut above = if n.stores(-a) { Some(maps[&(-a)].clone()) } else { None };
    let start = (-a - 1).min(n.hi());
    for d in (n.lo()..=start).rev() {
        let phi_up = match &above {
            Some(m) if d < -a => m.clone(),
            _ => DenseMatrix::zeros(f, target.dim(d + 1), n.dim(d + 1)),
        };
        let mut lhs = DenseMatrix::zeros(f, 0, target.dim(d));
        let mut rhs = DenseMatrix::zeros(f, 0, n.dim(d));
        for i in 0..l.nvars() {
            lhs = lhs.vstack(&target.act(i, d)?)?;
            rhs = rhs.vstack(&phi_up.mul(&n.act(i, d)?)?)?;
        }
        let z = lhs
            .solve_matrix(&rhs)?
            .ok_or_else(|| Error::Invariant(format!("no cofree extension in degree {d}")))?;
        maps.insert(d, z.clone());
        above = Some(z);
    }
    Ok(GradedMap { maps })
}

/// The complex GF(N) on positions 0..=m with its augmentation β: N → GF(N)^0.
#[derive(Clone, Debug)]
pub struct GfResolution<K: Field> {
    pub complex: FreeComplex<K>,
    pub beta: GradedMap<K>,
    pub module: GradedModule<K>,
}

/// GF(N) = G of the free S-complex F(N), on total positions 0..=m, with β assembled
/// from the cofree extensions of (-1)^p id_{N_p}.
pub fn gf_resolution<K: Field>(n: &GradedModule<K>, m: usize) -> Result<GfResolution<K>> {
    let l = n.ring();
    ensure(l.kind() == RingKind::Exterior && n.is_complete(), || "GF needs a complete Λ-module".into())?;
    let f = l.field();
    let m = m as i64;
    if n.is_zero() {
        let z = FreeComplex::new(l, 0, vec![FreeModule::zero(l); (m + 1) as usize], vec![crate::homalg::GradedMatrix::zero(&FreeModule::zero(l), &FreeModule::zero(l)); m as usize], false)?;
        return Ok(GfResolution { complex: z, beta: GradedMap { maps: BTreeMap::new() }, module: n.clone() });
    }
    let fc = f_module(n)?;
    let slices = ModuleComplex::from_free_slices(&fc, -n.hi(), m - n.lo() + 1)?;
    let complex = g_complex(&slices, 0, m)?.with_bounded(false);
    // β: block p of GF^0 is N_p ⊗ ⋀(V*)(-p)
    let mut beta = GradedMap { maps: BTreeMap::new() };
    let parts: Vec<GradedMap<K>> = n
        .degrees()
        .filter(|&p| n.dim(p) > 0)
        .map(|p| {
            let top = DenseMatrix::identity(f, n.dim(p)).scale(&f.pow_neg_one(p));
            cofree_extension(n, -p, &top)
        })
        .collect::<Result<_>>()?;
    let g0 = complex.term(0)?.full_module()?;
    for d in n.degrees() {
        let mut acc = DenseMatrix::zeros(f, 0, n.dim(d));
        for (k, p) in n.degrees().filter(|&p| n.dim(p) > 0).enumerate() {
            let h = wedge_term(l, -p, n.dim(p)).dim(d);
            let block = parts[k].get(d).cloned().unwrap_or_else(|| DenseMatrix::zeros(f, h, n.dim(d)));
            acc = acc.vstack(&block)?;
        }
        ensure(acc.rows() == g0.dim(d), || format!("β has the wrong height in degree {d}"))?;
        beta.maps.insert(d, acc);
    }
    Ok(GfResolution { complex, beta, module: n.clone() })
}

impl<K: Field> GfResolution<K> {
    /// β is an injective chain map, H⁰ has the dimensions of N, and H^p = 0 for 0 < p < m.
    pub fn verify(&self) -> Result<()> {
        let c = &self.complex;
        let n = &self.module;
        let g0 = c.term(0)?;
        let d0 = if c.stores(1) { Some(c.diff(0)?) } else { None };
        if let Some((lo, hi)) = g0.degree_span() {
            for d in lo..=hi {
                let b = self.beta.get(d).cloned().unwrap_or_else(|| DenseMatrix::zeros(n.field(), g0.dim(d), n.dim(d)));
                ensure(b.rank() == n.dim(d), || format!("β not injective in degree {d}"))?;
                if let Some(d0) = &d0 {
                    let s = d0.slice(d);
                    ensure(s.mul(&b)?.is_zero(), || format!("d∘β ≠ 0 in degree {d}"))?;
                    ensure(g0.dim(d) - s.rank() == n.dim(d), || format!("H⁰ differs from N in degree {d}"))?;
                }
            }
        }
        for p in 1..c.hi() {
            ensure(c.homology_all(p)?.is_empty(), || format!("GF(N) has homology in position {p}"))?;
        }
        Ok(())
    }
}

/// T^{-n-1} G((F(N•)^∨ ⊗ ω_S)*) on `depth + 1` positions ending one past its top
/// nonzero term. The leftmost position is a truncation and carries spurious homology.
pub fn left_resolution<K: Field>(c: &ModuleComplex<K>, depth: usize) -> Result<FreeComplex<K>> {
    let l = c.ring();
    ensure(l.kind() == RingKind::Exterior, || "left resolution needs a complex over Λ".into())?;
    let n1 = l.n() as i64 + 1;
    let dual = f_complex(c)?.dual()?.twist(-n1);
    if dual.terms().iter().all(|t| t.is_zero()) {
        return Ok(FreeComplex::zero(l));
    }
    // M^p = (C^{-p})*, nonzero in degrees ≤ -min generator of C^{-p}
    let t_max = dual
        .positions()
        .filter_map(|cp| dual.term(cp).ok()?.min_gen().map(|g| -cp - g))
        .max()
        .ok_or_else(|| Error::Invariant("no generators".into()))?;
    let t_lo = t_max + 1 - depth as i64;
    let ps: Vec<i64> = dual.positions().map(|cp| -cp).collect();
    let (pmin, pmax) = (*ps.iter().min().unwrap(), *ps.iter().max().unwrap());
    let slices = ModuleComplex::from_free_slices(&dual, pmin - t_max - 2, pmax - t_lo + 1)?;
    let m = slices.dual();
    Ok(g_complex(&m, t_lo, t_max + 1)?.translate(-n1).with_bounded(false))
}

/// Dimensions of H^p of a module complex per position, internal degree.
pub fn homology_table<K: Field>(c: &ModuleComplex<K>) -> Result<BTreeMap<i64, BTreeMap<i64, usize>>> {
    let mut out = BTreeMap::new();
    for p in c.positions() {
        let h = c.homology_dims(p)?;
        if !h.is_empty() {
            out.insert(p, h);
        }
    }
    Ok(out)
}
