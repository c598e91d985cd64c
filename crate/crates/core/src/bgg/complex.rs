use std::collections::BTreeMap;

use crate::error::{ensure, Error, Result};
use crate::exactlin::{DenseMatrix, Field};
use crate::homalg::FreeComplex;
use crate::rings::{GradedMap, GradedModule, Ring, RingKind};

/// A bounded complex of graded modules with degree-0 module maps.
///
/// Over Λ the modules are complete; over S they may be slices, in which case
/// maps are only known on the stored degrees.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleComplex<K: Field> {
    ring: Ring<K>,
    lo: i64,
    modules: Vec<GradedModule<K>>,
    /// `maps[k]`: position `lo+k` → `lo+k+1`
    maps: Vec<GradedMap<K>>,
}

/// Matrix of a graded map in degree d, zero when not stored.
pub fn map_in_degree<K: Field>(m: &GradedMap<K>, src: &GradedModule<K>, tgt: &GradedModule<K>, d: i64) -> DenseMatrix<K> {
    m.get(d).cloned().unwrap_or_else(|| DenseMatrix::zeros(src.field(), tgt.dim(d), src.dim(d)))
}

fn degree_union<K: Field>(a: &GradedModule<K>, b: &GradedModule<K>) -> Vec<i64> {
    let mut d: Vec<i64> = a.degrees().chain(b.degrees()).collect();
    d.sort();
    d.dedup();
    d
}

fn scale_map<K: Field>(m: &GradedMap<K>, s: &K::Elem) -> GradedMap<K> {
    GradedMap { maps: m.maps.iter().map(|(d, x)| (*d, x.scale(s))).collect() }
}

impl<K: Field> ModuleComplex<K> {
    pub fn new(ring: &Ring<K>, lo: i64, modules: Vec<GradedModule<K>>, maps: Vec<GradedMap<K>>) -> Result<Self> {
        ensure(maps.len() + 1 == modules.len() || (modules.is_empty() && maps.is_empty()), || {
            format!("{} maps for {} modules", maps.len(), modules.len())
        })?;
        let c = ModuleComplex { ring: ring.clone(), lo, modules, maps };
        c.validate()?;
        Ok(c)
    }

    /// Checks shapes, linearity and d² = 0 on every stored degree.
    pub fn validate(&self) -> Result<()> {
        for (k, m) in self.maps.iter().enumerate() {
            let (a, b) = (&self.modules[k], &self.modules[k + 1]);
            for (d, x) in &m.maps {
                ensure(x.rows() == b.dim(*d) && x.cols() == a.dim(*d), || {
                    format!("map at position {} has the wrong shape in degree {d}", self.lo + k as i64)
                })?;
            }
            m.check_linear(a, b)?;
        }
        for k in 0..self.maps.len().saturating_sub(1) {
            let (a, b, c) = (&self.modules[k], &self.modules[k + 1], &self.modules[k + 2]);
            for d in a.degrees() {
                if !c.stores(d) && !c.is_complete() {
                    continue;
                }
                let sq = map_in_degree(&self.maps[k + 1], b, c, d).mul(&map_in_degree(&self.maps[k], a, b, d))?;
                ensure(sq.is_zero(), || format!("d² ≠ 0 at position {} in degree {d}", self.lo + k as i64))?;
            }
        }
        Ok(())
    }

    pub fn zero(ring: &Ring<K>) -> Self {
        ModuleComplex { ring: ring.clone(), lo: 0, modules: Vec::new(), maps: Vec::new() }
    }

    /// A module concentrated in position p.
    pub fn single(m: &GradedModule<K>, p: i64) -> Self {
        ModuleComplex { ring: m.ring().clone(), lo: p, modules: vec![m.clone()], maps: Vec::new() }
    }

    pub fn ring(&self) -> &Ring<K> {
        &self.ring
    }
    pub fn field(&self) -> &K {
        self.ring.field()
    }
    pub fn lo(&self) -> i64 {
        self.lo
    }
    pub fn hi(&self) -> i64 {
        self.lo + self.modules.len() as i64 - 1
    }
    pub fn positions(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi()
    }
    pub fn modules(&self) -> &[GradedModule<K>] {
        &self.modules
    }
    pub fn maps(&self) -> &[GradedMap<K>] {
        &self.maps
    }

    pub fn module(&self, p: i64) -> GradedModule<K> {
        let k = p - self.lo;
        if k < 0 || k as usize >= self.modules.len() {
            GradedModule::zero(&self.ring)
        } else {
            self.modules[k as usize].clone()
        }
    }

    /// `d^p` (the zero map outside the stored positions).
    pub fn map(&self, p: i64) -> GradedMap<K> {
        let k = p - self.lo;
        if k < 0 || k as usize >= self.maps.len() {
            GradedMap { maps: BTreeMap::new() }
        } else {
            self.maps[k as usize].clone()
        }
    }

    /// `d^p` in degree d.
    pub fn map_matrix(&self, p: i64, d: i64) -> DenseMatrix<K> {
        map_in_degree(&self.map(p), &self.module(p), &self.module(p + 1), d)
    }

    pub fn is_zero(&self) -> bool {
        self.modules.iter().all(|m| m.is_zero())
    }

    /// T^k: position p holds N^{p+k}, differential multiplied by (-1)^k.
    pub fn translate(&self, k: i64) -> Self {
        let s = self.field().pow_neg_one(k);
        ModuleComplex {
            ring: self.ring.clone(),
            lo: self.lo - k,
            modules: self.modules.clone(),
            maps: self.maps.iter().map(|m| scale_map(m, &s)).collect(),
        }
    }

    /// N•(a): every module twisted; over Λ the differential picks up (-1)^a.
    pub fn twist(&self, a: i64) -> Self {
        let s = if self.ring.kind() == RingKind::Exterior { self.field().pow_neg_one(a) } else { self.field().one() };
        let maps = self
            .maps
            .iter()
            .map(|m| GradedMap { maps: m.maps.iter().map(|(d, x)| (d - a, x.scale(&s))).collect() })
            .collect();
        ModuleComplex { ring: self.ring.clone(), lo: self.lo, modules: self.modules.iter().map(|m| m.twist(a)).collect(), maps }
    }

    /// Graded k-dual: position p holds (N^{-p})*, d^p = (-1)^{p+1} (d^{-p-1})*,
    /// where the dual of a map in degree q is the transpose of its degree -q part.
    pub fn dual(&self) -> Self {
        let f = self.field();
        let lo = -self.hi();
        let modules: Vec<GradedModule<K>> = self.modules.iter().rev().map(|m| m.dual()).collect();
        let maps = (0..self.maps.len())
            .map(|k| {
                let p = lo + k as i64;
                let s = f.pow_neg_one(p + 1);
                let old = self.map(-p - 1);
                GradedMap { maps: old.maps.iter().map(|(d, x)| (-d, x.transpose().scale(&s))).collect() }
            })
            .collect();
        ModuleComplex { ring: self.ring.clone(), lo, modules, maps }
    }

    /// Positions `lo..=hi`, padding with zero modules.
    pub fn window(&self, lo: i64, hi: i64) -> Self {
        let modules = (lo..=hi).map(|p| self.module(p)).collect();
        let maps = (lo..hi).map(|p| self.map(p)).collect();
        ModuleComplex { ring: self.ring.clone(), lo, modules, maps }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.modules.is_empty() {
            return Ok(other.clone());
        }
        if other.modules.is_empty() {
            return Ok(self.clone());
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let (a, b) = (self.window(lo, hi), other.window(lo, hi));
        let modules = a.modules.iter().zip(&b.modules).map(|(x, y)| x.direct_sum(y)).collect::<Result<Vec<_>>>()?;
        let f = self.field();
        let maps = (lo..hi)
            .map(|p| {
                let degs = degree_union(&modules[(p - lo) as usize], &modules[(p + 1 - lo) as usize]);
                let maps = degs
                    .into_iter()
                    .map(|d| (d, DenseMatrix::block_diag(f, &[a.map_matrix(p, d), b.map_matrix(p, d)])))
                    .collect();
                GradedMap { maps }
            })
            .collect();
        ModuleComplex::new(&self.ring, lo, modules, maps)
    }

    /// Mapping cone of φ: X → Y given by `phi(p)` at each position:
    /// Con^p = X^{p+1} ⊕ Y^p, d = [[-d_X, 0], [φ, d_Y]].
    pub fn cone(phi: impl Fn(i64) -> GradedMap<K>, x: &Self, y: &Self) -> Result<Self> {
        let f = x.field();
        let lo = (x.lo - 1).min(y.lo);
        let hi = (x.hi() - 1).max(y.hi());
        let modules =
            (lo..=hi).map(|p| x.module(p + 1).direct_sum(&y.module(p))).collect::<Result<Vec<_>>>()?;
        let mut maps = Vec::new();
        for p in lo..hi {
            let (s, t) = (&modules[(p - lo) as usize], &modules[(p + 1 - lo) as usize]);
            let mut out = BTreeMap::new();
            for d in degree_union(s, t) {
                let (x1, x2, y0, y1) = (x.module(p + 1), x.module(p + 2), y.module(p), y.module(p + 1));
                let mut m = DenseMatrix::zeros(f, t.dim(d), s.dim(d));
                m.set_block(0, 0, &x.map_matrix(p + 1, d).neg());
                m.set_block(x2.dim(d), 0, &map_in_degree(&phi(p + 1), &x1, &y1, d));
                m.set_block(x2.dim(d), x1.dim(d), &y.map_matrix(p, d));
                let _ = y0;
                out.insert(d, m);
            }
            maps.push(GradedMap { maps: out });
        }
        ModuleComplex::new(&x.ring, lo, modules, maps)
    }

    /// Kernel of d^p as degreewise column bases.
    fn kernel_bases(&self, p: i64) -> BTreeMap<i64, DenseMatrix<K>> {
        let m = self.module(p);
        m.degrees().map(|d| (d, self.map_matrix(p, d).kernel_basis())).collect()
    }

    /// H^p as a module, with degreewise cycle representatives (columns in N^p coordinates).
    pub fn homology(&self, p: i64) -> Result<(GradedModule<K>, BTreeMap<i64, DenseMatrix<K>>)> {
        let m = self.module(p);
        if m.is_zero() {
            return Ok((GradedModule::zero(&self.ring), BTreeMap::new()));
        }
        let kb = self.kernel_bases(p);
        let (z, incl) = m.submodule(&kb)?;
        let mut img = BTreeMap::new();
        for d in z.degrees() {
            let b = self.map_matrix(p - 1, d);
            let coords = incl
                .get(d)
                .unwrap()
                .solve_matrix(&b)?
                .ok_or_else(|| Error::Invariant(format!("boundaries are not cycles at position {p}")))?;
            img.insert(d, coords);
        }
        let (h, proj) = z.quotient(&img)?;
        let f = self.field();
        let reps = h
            .degrees()
            .map(|d| {
                let q = crate::exactlin::Quotient::new(f, img.get(&d).unwrap());
                let _ = proj.get(d);
                (d, incl.get(d).unwrap().dot(&q.section(f)))
            })
            .collect();
        Ok((h, reps))
    }

    /// dim H^p per degree (zero entries omitted).
    pub fn homology_dims(&self, p: i64) -> Result<BTreeMap<i64, usize>> {
        let m = self.module(p);
        let mut out = BTreeMap::new();
        for d in m.degrees() {
            let z = m.dim(d) - self.map_matrix(p, d).rank();
            let b = self.map_matrix(p - 1, d).rank();
            if z > b {
                out.insert(d, z - b);
            }
        }
        Ok(out)
    }

    /// The complex H•(N•) with zero differential.
    pub fn homology_complex(&self) -> Result<Self> {
        let modules = self.positions().map(|p| self.homology(p).map(|h| h.0)).collect::<Result<Vec<_>>>()?;
        let maps = (0..modules.len().saturating_sub(1)).map(|_| GradedMap { maps: BTreeMap::new() }).collect();
        Ok(ModuleComplex { ring: self.ring.clone(), lo: self.lo, modules, maps })
    }

    /// τ^{≤m}: positions below m unchanged, ker d^m in position m.
    pub fn truncate_le(&self, m: i64) -> Result<Self> {
        if m < self.lo {
            return Ok(ModuleComplex::zero(&self.ring));
        }
        if m >= self.hi() {
            return Ok(self.clone());
        }
        let (z, incl) = self.module(m).submodule(&self.kernel_bases(m))?;
        let mut modules: Vec<GradedModule<K>> = (self.lo..m).map(|p| self.module(p)).collect();
        let mut maps: Vec<GradedMap<K>> = (self.lo..m - 1).map(|p| self.map(p)).collect();
        if m > self.lo {
            let prev = self.module(m - 1);
            let mut lifted = BTreeMap::new();
            for d in prev.degrees() {
                if z.dim(d) == 0 {
                    continue;
                }
                let b = self.map_matrix(m - 1, d);
                let x = incl.get(d).unwrap().solve_matrix(&b)?.ok_or_else(|| Error::Invariant("d² ≠ 0".into()))?;
                lifted.insert(d, x);
            }
            maps.push(GradedMap { maps: lifted });
        }
        modules.push(z);
        ModuleComplex::new(&self.ring, self.lo, modules, maps)
    }

    /// τ^{>m}: N^m / ker d^m in position m, positions above m unchanged.
    pub fn truncate_gt(&self, m: i64) -> Result<Self> {
        if m < self.lo {
            return Ok(self.clone());
        }
        if m >= self.hi() {
            return Ok(ModuleComplex::zero(&self.ring));
        }
        let (q, proj) = self.module(m).quotient(&self.kernel_bases(m))?;
        let f = self.field();
        let mut induced = BTreeMap::new();
        for d in q.degrees() {
            // d^m factors through the quotient: d^m = induced ∘ proj
            let sec = crate::exactlin::Quotient::new(f, &self.map_matrix(m, d).kernel_basis()).section(f);
            let _ = proj.get(d);
            induced.insert(d, self.map_matrix(m, d).dot(&sec));
        }
        let mut modules = vec![q];
        modules.extend((m + 1..=self.hi()).map(|p| self.module(p)));
        let mut maps = vec![GradedMap { maps: induced }];
        maps.extend((m + 1..self.hi()).map(|p| self.map(p)));
        ModuleComplex::new(&self.ring, m, modules, maps)
    }

    /// The complex of graded modules underlying a complex of free modules over Λ.
    pub fn from_free(c: &FreeComplex<K>) -> Result<Self> {
        ensure(c.ring().kind() != RingKind::Symmetric, || "free S-modules are infinite; use from_free_slices".into())?;
        let modules = c.terms().iter().map(|t| t.full_module()).collect::<Result<Vec<_>>>()?;
        let maps = (0..c.diffs().len())
            .map(|k| {
                let degs = degree_union(&modules[k], &modules[k + 1]);
                GradedMap { maps: degs.into_iter().map(|d| (d, c.diffs()[k].slice(d))).collect() }
            })
            .collect();
        ModuleComplex::new(c.ring(), c.lo(), modules, maps)
    }

    /// Degree slices `lo..=hi` of a complex of free S-modules.
    pub fn from_free_slices(c: &FreeComplex<K>, lo: i64, hi: i64) -> Result<Self> {
        let modules = c.terms().iter().map(|t| t.graded_module(lo, hi)).collect::<Result<Vec<_>>>()?;
        let maps = c
            .diffs()
            .iter()
            .map(|d| GradedMap { maps: (lo..=hi).map(|e| (e, d.slice(e))).collect() })
            .collect();
        ModuleComplex::new(c.ring(), c.lo(), modules, maps)
    }

    /// Total dimension in degree d across positions, for quick comparisons.
    pub fn dims_at(&self, p: i64) -> BTreeMap<i64, usize> {
        let m = self.module(p);
        m.degrees().filter(|&d| m.dim(d) > 0).map(|d| (d, m.dim(d))).collect()
    }
}

/// Checks that `phi` (indexed by position) is a chain map x → y of module maps, and
/// with `iso` that every component is invertible in every degree.
pub fn check_chain_map<K: Field>(
    x: &ModuleComplex<K>,
    y: &ModuleComplex<K>,
    phi: &BTreeMap<i64, GradedMap<K>>,
    iso: bool,
) -> Result<()> {
    let zero = GradedMap { maps: BTreeMap::new() };
    let at = |p: i64| phi.get(&p).unwrap_or(&zero);
    let lo = x.lo().min(y.lo());
    let hi = x.hi().max(y.hi());
    for p in lo..=hi {
        let (xp, yp) = (x.module(p), y.module(p));
        at(p).check_linear(&xp, &yp)?;
        for d in degree_union(&xp, &yp) {
            let m = map_in_degree(at(p), &xp, &yp, d);
            if iso {
                ensure(m.is_square() && m.rank() == m.rows(), || format!("component at position {p} not invertible in degree {d}"))?;
            }
            let lhs = y.map_matrix(p, d).mul(&m)?;
            let rhs = map_in_degree(at(p + 1), &x.module(p + 1), &y.module(p + 1), d).mul(&x.map_matrix(p, d))?;
            ensure(lhs == rhs, || format!("not a chain map at position {p} in degree {d}"))?;
        }
    }
    Ok(())
}
