//! Explicit isomorphisms behind the twist and duality identities of the BGG functors.

use std::collections::BTreeMap;

use super::complex::{check_chain_map, ModuleComplex};
use super::functors::{f_double, g_double, pad, wedge_term};
use crate::error::{ensure, Error, Result};
use crate::exactlin::{DenseMatrix, Field};
use crate::homalg::{ChainMap, FreeComplex, GradedMatrix, TotLayout};
use crate::rings::{GradedMap, GradedModule, Ring, RingKind};

/// The chain isomorphism F(N•*) → F(N•)^∨: block (p, q) goes to block (-p, -q)
/// with sign (-1)^{pq}. Returns the two complexes and the verified map.
pub fn f_dual_certificate<K: Field>(c: &ModuleComplex<K>) -> Result<(FreeComplex<K>, FreeComplex<K>, ChainMap<K>)> {
    let f = c.field();
    let (lhs, ll) = f_double(&c.dual())?.total()?;
    let (tot, rl) = f_double(c)?.total()?;
    let rhs = tot.dual()?;
    if lhs.terms().is_empty() {
        return Ok((lhs, rhs, ChainMap { lo: 0, maps: Vec::new() }));
    }
    let mut maps = Vec::new();
    for t in lhs.positions() {
        let (src, tgt) = (lhs.term(t)?, rhs.term(t)?);
        let mut m = GradedMatrix::zero(&src, &tgt);
        for &(p, q, off, r) in ll.blocks_at(t) {
            let &(_, _, off2, r2) = rl
                .blocks_at(-t)
                .iter()
                .find(|b| b.0 == -p && b.1 == -q)
                .ok_or_else(|| Error::Invariant(format!("no dual block for ({p},{q})")))?;
            ensure(r == r2, || "dual blocks differ in rank".into())?;
            let s = src.ring().constant(f.pow_neg_one(p * q));
            for j in 0..r {
                m.set_entry(off2 + j, off + j, s.clone())?;
            }
        }
        maps.push(m);
    }
    let phi = ChainMap { lo: lhs.lo(), maps };
    phi.check(&lhs, &rhs)?;
    Ok((lhs, rhs, phi))
}

/// The Λ-isomorphism ⋀(V*)(u-n-1) → ⋀(V*)(-u)* of rank-one modules, sending the
/// generator to the basis vector of the dual in degree -u.
pub fn wedge_duality<K: Field>(l: &Ring<K>, u: i64) -> Result<GradedMap<K>> {
    let free = wedge_term(l, u - l.n() as i64 - 1, 1);
    let src = free.full_module()?;
    let tgt = wedge_term(l, -u, 1).full_module()?.dual();
    ensure(tgt.dim(-u) == 1, || "dual has no generator in the expected degree".into())?;
    let f = l.field();
    let mut maps = BTreeMap::new();
    for d in src.degrees() {
        let basis = free.basis(d);
        let mut m = DenseMatrix::zeros(f, tgt.dim(d), basis.len());
        for (col, (_, mono)) in basis.iter().enumerate() {
            let img = tgt.act_monomial(mono, -u)?.mul_vec(&[f.one()])?;
            for (r, x) in img.into_iter().enumerate() {
                m.set(r, col, x);
            }
        }
        maps.insert(d, m);
    }
    let phi = GradedMap { maps };
    phi.check_linear(&src, &tgt)?;
    Ok(phi)
}

/// Verified chain isomorphism G(M•)* ≅ T^{-n-1} G((M• ⊗ ω_S)*) for a complex of
/// finite-length S-modules.
#[derive(Clone, Debug)]
pub struct GDualCertificate<K: Field> {
    pub lhs: ModuleComplex<K>,
    pub rhs: ModuleComplex<K>,
    /// position → component rhs → lhs
    pub iso: BTreeMap<i64, GradedMap<K>>,
}

fn total_range<K: Field>(c: &ModuleComplex<K>) -> Option<(i64, i64)> {
    let mut r: Option<(i64, i64)> = None;
    for p in c.positions() {
        let m = c.module(p);
        if m.is_zero() {
            continue;
        }
        let (a, b) = (p + m.lo(), p + m.hi());
        r = Some(r.map_or((a, b), |(x, y)| (x.min(a), y.max(b))));
    }
    r
}

/// Block of a module piece: rows of generators `off..off+r` of `free` in degree d.
fn block_offsets<K: Field>(free: &crate::homalg::FreeModule<K>, d: i64, off: usize, r: usize) -> Vec<usize> {
    let offs = free.offsets(d);
    (off..off + r).map(|j| offs[j]).collect()
}

/// Finds the isomorphism blockwise: each block carries the unique-up-to-scalar map
/// id ⊗ ψ, and the scalars are a nowhere-zero solution of the chain-map equations.
pub fn g_dual_certificate<K: Field>(c: &ModuleComplex<K>) -> Result<GDualCertificate<K>> {
    ensure(c.ring().kind() == RingKind::Symmetric && c.modules().iter().all(|m| m.is_complete()), || {
        "the duality certificate needs finite-length S-modules".into()
    })?;
    let l = c.ring().dual_ring();
    let f = l.field().clone();
    let n1 = l.n() as i64 + 1;
    let Some((lo, hi)) = total_range(c) else {
        return Ok(GDualCertificate { lhs: ModuleComplex::zero(&l), rhs: ModuleComplex::zero(&l), iso: BTreeMap::new() });
    };
    let (gtot, gl) = g_double(c, lo, hi)?.total()?;
    let gfree = pad(&gtot, &l, lo, hi)?;
    let lhs = ModuleComplex::from_free(&gfree)?.dual();
    let c2 = c.twist(-n1).dual();
    let (lo2, hi2) = (-hi - n1, -lo - n1);
    let (rtot, rl) = g_double(&c2, lo2, hi2)?.total()?;
    let rfree = pad(&rtot, &l, lo2, hi2)?;
    let rhs = ModuleComplex::from_free(&rfree.translate(-n1))?;

    // unscaled blocks U_v, v = (t, p)
    struct Block<K: Field> {
        t: i64,
        maps: BTreeMap<i64, DenseMatrix<K>>,
    }
    let mut blocks: Vec<Block<K>> = Vec::new();
    let mut psi_cache: BTreeMap<i64, GradedMap<K>> = BTreeMap::new();
    for t in lhs.positions() {
        let (lm, rm) = (lhs.module(t), rhs.module(t));
        let gterm = gfree.term(-t)?;
        let rterm = rfree.term(t - n1)?;
        for &(p, q, off, r) in blocks_of(&gl, -t) {
            let &(_, _, off2, r2) = blocks_of(&rl, t - n1)
                .iter()
                .find(|b| b.0 == -p)
                .ok_or_else(|| Error::Invariant(format!("no matching block for ({p},{q})")))?;
            ensure(r == r2, || "matching blocks differ in rank".into())?;
            let u = t + p;
            if let std::collections::btree_map::Entry::Vacant(e) = psi_cache.entry(u) {
                e.insert(wedge_duality(&l, u)?);
            }
            let psi = &psi_cache[&u];
            let mut maps = BTreeMap::new();
            for d in lm.degrees().chain(rm.degrees()) {
                let mut m = DenseMatrix::zeros(&f, lm.dim(d), rm.dim(d));
                if let Some(x) = psi.get(d) {
                    let rows = block_offsets(&gterm, -d, off, r);
                    let cols = block_offsets(&rterm, d, off2, r);
                    for j in 0..r {
                        m.set_block(rows[j], cols[j], x);
                    }
                }
                maps.insert(d, m);
            }
            blocks.push(Block { t, maps });
        }
    }
    // chain-map equations, linear in the block scalars
    let nv = blocks.len();
    let mut rows: Vec<Vec<K::Elem>> = Vec::new();
    for t in lhs.lo() - 1..=lhs.hi() {
        let (l0, l1, r0, r1) = (lhs.module(t), lhs.module(t + 1), rhs.module(t), rhs.module(t + 1));
        let degs: Vec<i64> = l0.degrees().chain(l1.degrees()).chain(r0.degrees()).chain(r1.degrees()).collect();
        let (dmin, dmax) = match (degs.iter().min(), degs.iter().max()) {
            (Some(a), Some(b)) => (*a, *b),
            _ => continue,
        };
        for d in dmin..=dmax {
            let (h, w) = (l1.dim(d), r0.dim(d));
            if h * w == 0 {
                continue;
            }
            let mut cols: Vec<Vec<K::Elem>> = vec![vec![f.zero(); h * w]; nv];
            for (v, b) in blocks.iter().enumerate() {
                let block = |m: &GradedModule<K>, n: &GradedModule<K>| {
                    b.maps.get(&d).cloned().unwrap_or_else(|| DenseMatrix::zeros(&f, m.dim(d), n.dim(d)))
                };
                let contrib = if b.t == t {
                    lhs.map_matrix(t, d).mul(&block(&l0, &r0))?
                } else if b.t == t + 1 {
                    block(&l1, &r1).mul(&rhs.map_matrix(t, d))?.neg()
                } else {
                    continue;
                };
                cols[v] = contrib.entries().to_vec();
            }
            for e in 0..h * w {
                rows.push((0..nv).map(|v| cols[v][e].clone()).collect());
            }
        }
    }
    let sys = DenseMatrix::from_fn(&f, rows.len(), nv, |r, c| rows[r][c].clone());
    let ker = sys.kernel_basis();
    let mut found = None;
    'search: for trial in 1..=32i64 {
        let mut s = vec![f.zero(); nv];
        for j in 0..ker.cols() {
            let coef = f.from_i64(trial.pow(j as u32 % 7) + j as i64);
            for (v, x) in s.iter_mut().enumerate() {
                *x = f.add(x, &f.mul(&coef, ker.get(v, j)));
            }
        }
        if s.iter().all(|x| !f.is_zero(x)) {
            found = Some(s);
            break 'search;
        }
    }
    let s = found.ok_or_else(|| Error::Invariant("no nowhere-zero scalars make the blocks a chain map".into()))?;
    let mut iso: BTreeMap<i64, GradedMap<K>> = BTreeMap::new();
    for (b, sv) in blocks.iter().zip(&s) {
        let e = iso.entry(b.t).or_insert_with(|| GradedMap { maps: BTreeMap::new() });
        for (d, m) in &b.maps {
            let scaled = m.scale(sv);
            let cur = e.maps.remove(d);
            e.maps.insert(*d, match cur {
                Some(x) => x.add(&scaled)?,
                None => scaled,
            });
        }
    }
    check_chain_map(&rhs, &lhs, &iso, true)?;
    Ok(GDualCertificate { lhs, rhs, iso })
}

fn blocks_of(layout: &TotLayout, t: i64) -> &[(i64, i64, usize, usize)] {
    layout.blocks_at(t)
}
