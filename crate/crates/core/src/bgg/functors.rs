use super::complex::{map_in_degree, ModuleComplex};
use crate::error::{ensure, Error, Result};
use crate::exactlin::{DenseMatrix, Field};
use crate::homalg::{DoubleComplex, FreeComplex, FreeModule, GradedMatrix};
use crate::rings::{GradedModule, Monomial, Ring, RingKind};

/// The matrix with entries `s · Σ_i (mats[i])_{kl} v_i` over `ring`.
pub(crate) fn linear_matrix<K: Field>(
    ring: &Ring<K>,
    src: &FreeModule<K>,
    tgt: &FreeModule<K>,
    mats: &[DenseMatrix<K>],
    s: &K::Elem,
) -> Result<GradedMatrix<K>> {
    let f = ring.field();
    let nv = ring.nvars();
    let mut m = GradedMatrix::zero(src, tgt);
    for k in 0..tgt.rank() {
        for l in 0..src.rank() {
            let terms: Vec<(Monomial, K::Elem)> = (0..nv)
                .filter(|&i| !f.is_zero(mats[i].get(k, l)))
                .map(|i| (Monomial::var(nv, i), f.mul(s, mats[i].get(k, l))))
                .collect();
            if !terms.is_empty() {
                m.set_entry(k, l, ring.from_terms(terms)?)?;
            }
        }
    }
    Ok(m)
}

fn action_mats<K: Field>(m: &GradedModule<K>, d: i64) -> Result<Vec<DenseMatrix<K>>> {
    (0..m.ring().nvars()).map(|i| m.act(i, d)).collect()
}

fn require_kind<K: Field>(ring: &Ring<K>, kind: RingKind, what: &str) -> Result<()> {
    ensure(ring.kind() == kind, || format!("{what} needs a module over {}", if kind == RingKind::Exterior { "Λ" } else { "S" }))
}

/// Free S-module S(p)^{dim N_p}.
fn f_term<K: Field>(s: &Ring<K>, n: &GradedModule<K>, p: i64) -> FreeModule<K> {
    FreeModule::new(s, vec![-p; n.dim(p)])
}

/// Free Λ-module ⋀(V*)(q)^{r}: generators in degree -q-n-1.
pub fn wedge_term<K: Field>(l: &Ring<K>, q: i64, r: usize) -> FreeModule<K> {
    FreeModule::new(l, vec![-q - l.n() as i64 - 1; r])
}

/// F(N) for a finite-dimensional Λ-module: S(p) ⊗ N_p in position p, d = Σ X_i ⊗ e_i.
pub fn f_module<K: Field>(n: &GradedModule<K>) -> Result<FreeComplex<K>> {
    require_kind(n.ring(), RingKind::Exterior, "F")?;
    let s = n.ring().dual_ring();
    if n.is_zero() {
        return Ok(FreeComplex::zero(&s));
    }
    let one = s.field().one();
    let terms: Vec<FreeModule<K>> = n.degrees().map(|p| f_term(&s, n, p)).collect();
    let diffs = (n.lo()..n.hi())
        .map(|p| {
            let k = (p - n.lo()) as usize;
            linear_matrix(&s, &terms[k], &terms[k + 1], &action_mats(n, p)?, &one)
        })
        .collect::<Result<Vec<_>>>()?;
    FreeComplex::new(&s, n.lo(), terms, diffs, true)
}

/// The double complex X^{pq} = F(N^p)^q with horizontal maps F(d^p).
pub fn f_double<K: Field>(c: &ModuleComplex<K>) -> Result<DoubleComplex<K>> {
    require_kind(c.ring(), RingKind::Exterior, "F")?;
    let s = c.ring().dual_ring();
    let one = s.field().one();
    let mut x = DoubleComplex::new(&s);
    for p in c.positions() {
        let n = c.module(p);
        for q in n.degrees() {
            if n.dim(q) > 0 {
                x.terms.insert((p, q), f_term(&s, &n, q));
            }
        }
    }
    for &(p, q) in x.terms.clone().keys() {
        let n = c.module(p);
        let src = x.term(p, q);
        let right = x.term(p + 1, q);
        if !right.is_zero() {
            let d = c.map_matrix(p, q);
            x.dh.insert((p, q), GradedMatrix::from_scalar(&src, &right, &d)?);
        }
        let up = x.term(p, q + 1);
        if !up.is_zero() {
            x.dv.insert((p, q), linear_matrix(&s, &src, &up, &action_mats(&n, q)?, &one)?);
        }
    }
    x.check()?;
    Ok(x)
}

/// F(N•) = tot of the F-columns.
pub fn f_complex<K: Field>(c: &ModuleComplex<K>) -> Result<FreeComplex<K>> {
    require_kind(c.ring(), RingKind::Exterior, "F")?;
    Ok(f_double(c)?.total()?.0)
}

/// The chain map F(φ) for a map of Λ-modules: the scalar matrix of φ_p in position p.
pub fn f_map<K: Field>(
    phi: &crate::rings::GradedMap<K>,
    src: &GradedModule<K>,
    tgt: &GradedModule<K>,
    fsrc: &FreeComplex<K>,
    ftgt: &FreeComplex<K>,
) -> Result<crate::homalg::ChainMap<K>> {
    let lo = fsrc.lo().min(ftgt.lo());
    let hi = fsrc.hi().max(ftgt.hi());
    let maps = (lo..=hi)
        .map(|p| {
            let a = fsrc.term(p)?;
            let b = ftgt.term(p)?;
            GradedMatrix::from_scalar(&a, &b, &map_in_degree(phi, src, tgt, p))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(crate::homalg::ChainMap { lo, maps })
}

/// G(M) on positions `lo..=hi`: M_p ⊗ ⋀(V*)(p) with d = (-1)^{p+1} Σ X_i ⊗ e_i
/// in the free-module presentation of ⋀(V*)(p).
///
/// The result is bounded only when M is complete and the window covers it.
pub fn g_module<K: Field>(m: &GradedModule<K>, lo: i64, hi: i64) -> Result<FreeComplex<K>> {
    require_kind(m.ring(), RingKind::Symmetric, "G")?;
    ensure(lo <= hi, || format!("empty window {lo}..{hi}"))?;
    let l = m.ring().dual_ring();
    let f = l.field();
    for d in lo..=hi {
        m.dim_checked(d)?;
    }
    let terms: Vec<FreeModule<K>> = (lo..=hi).map(|p| wedge_term(&l, p, m.dim(p))).collect();
    let diffs = (lo..hi)
        .map(|p| {
            let k = (p - lo) as usize;
            linear_matrix(&l, &terms[k], &terms[k + 1], &action_mats(m, p)?, &f.pow_neg_one(p + 1))
        })
        .collect::<Result<Vec<_>>>()?;
    let bounded = m.is_complete() && (m.is_zero() || (lo <= m.lo() && hi >= m.hi()));
    FreeComplex::new(&l, lo, terms, diffs, bounded)
}

/// The double complex Y^{pq} = G(M^p)^q restricted to total positions `lo..=hi`.
pub fn g_double<K: Field>(c: &ModuleComplex<K>, lo: i64, hi: i64) -> Result<DoubleComplex<K>> {
    require_kind(c.ring(), RingKind::Symmetric, "G")?;
    let l = c.ring().dual_ring();
    let f = l.field();
    let mut y = DoubleComplex::new(&l);
    for p in c.positions() {
        let m = c.module(p);
        for t in lo..=hi {
            let q = t - p;
            let r = m.dim_checked(q).map_err(|_| {
                Error::OutsideWindow(format!("degree {q} of the module in position {p} is not stored"))
            })?;
            if r > 0 {
                y.terms.insert((p, q), wedge_term(&l, q, r));
            }
        }
    }
    for &(p, q) in y.terms.clone().keys() {
        let m = c.module(p);
        let src = y.term(p, q);
        let right = y.term(p + 1, q);
        if !right.is_zero() {
            y.dh.insert((p, q), GradedMatrix::from_scalar(&src, &right, &c.map_matrix(p, q))?);
        }
        let up = y.term(p, q + 1);
        if !up.is_zero() {
            y.dv.insert((p, q), linear_matrix(&l, &src, &up, &action_mats(&m, q)?, &f.pow_neg_one(q + 1))?);
        }
    }
    y.check()?;
    Ok(y)
}

/// G(M•) on total positions `lo..=hi`; terms outside the double complex are zero.
pub fn g_complex<K: Field>(c: &ModuleComplex<K>, lo: i64, hi: i64) -> Result<FreeComplex<K>> {
    let y = g_double(c, lo, hi)?;
    let l = c.ring().dual_ring();
    let (tot, _) = y.total()?;
    let full = pad(&tot, &l, lo, hi)?;
    let bounded = c.modules().iter().all(|m| m.is_complete()) && covers(c, lo, hi);
    Ok(full.with_bounded(bounded))
}

/// Whether every nonzero piece of a complex of complete modules has total position in `lo..=hi`.
fn covers<K: Field>(c: &ModuleComplex<K>, lo: i64, hi: i64) -> bool {
    c.positions().all(|p| {
        let m = c.module(p);
        m.is_zero() || (m.lo() + p >= lo && m.hi() + p <= hi)
    })
}

/// Extend a bounded complex by zero terms to positions `lo..=hi`.
pub(crate) fn pad<K: Field>(c: &FreeComplex<K>, ring: &Ring<K>, lo: i64, hi: i64) -> Result<FreeComplex<K>> {
    let c = if c.terms().is_empty() { FreeComplex::zero(ring).with_bounded(true) } else { c.clone() };
    let terms: Vec<FreeModule<K>> = (lo..=hi)
        .map(|p| if c.stores(p) { c.term(p) } else { Ok(FreeModule::zero(ring)) })
        .collect::<Result<Vec<_>>>()?;
    let diffs = (lo..hi)
        .map(|p| {
            if c.stores(p) && c.stores(p + 1) {
                c.diff(p)
            } else {
                Ok(GradedMatrix::zero(&terms[(p - lo) as usize], &terms[(p + 1 - lo) as usize]))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    FreeComplex::new(ring, lo, terms, diffs, c.is_bounded())
}

/// F(φ) for a chain map φ: X• → Y• of Λ-complexes, given by its components per position,
/// as a chain map between the total complexes on their common positions.
pub fn f_chain_map<K: Field>(
    phi: impl Fn(i64) -> crate::rings::GradedMap<K>,
    x: &ModuleComplex<K>,
    y: &ModuleComplex<K>,
) -> Result<(FreeComplex<K>, FreeComplex<K>, crate::homalg::ChainMap<K>)> {
    let (fx, lx) = f_double(x)?.total()?;
    let (fy, ly) = f_double(y)?.total()?;
    let s = x.ring().dual_ring();
    let lo = fx.lo().min(fy.lo());
    let hi = fx.hi().max(fy.hi());
    let fx = pad(&fx, &s, lo, hi)?;
    let fy = pad(&fy, &s, lo, hi)?;
    let mut maps = Vec::new();
    for t in lo..=hi {
        let (a, b) = (fx.term(t)?, fy.term(t)?);
        let mut m = DenseMatrix::zeros(s.field(), b.rank(), a.rank());
        for &(p, q, off, r) in lx.blocks_at(t) {
            if let Some(&(_, _, off2, r2)) = ly.blocks_at(t).iter().find(|bl| bl.0 == p && bl.1 == q) {
                let mat = map_in_degree(&phi(p), &x.module(p), &y.module(p), q);
                ensure(mat.rows() == r2 && mat.cols() == r, || format!("component {p} has the wrong shape"))?;
                m.set_block(off2, off, &mat);
            }
        }
        maps.push(GradedMatrix::from_scalar(&a, &b, &m)?);
    }
    let cm = crate::homalg::ChainMap { lo, maps };
    cm.check(&fx, &fy)?;
    Ok((fx, fy, cm))
}
