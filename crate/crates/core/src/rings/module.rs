use std::collections::BTreeMap;

use super::ring::{Monomial, Ring, RingElem, RingKind};
use crate::error::{ensure, Error, Result};
use crate::exactlin::{DenseMatrix, Field};

/// A graded module given by its pieces and the action matrices of the variables.
///
/// Degrees `lo..=hi` are stored. A `complete` module is zero outside that range;
/// otherwise the data is a slice and nothing is known beyond it.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedModule<K: Field> {
    ring: Ring<K>,
    lo: i64,
    dims: Vec<usize>,
    /// `action[i][k]` is the matrix of the i-th variable from degree `lo+k` to `lo+k+1`.
    action: Vec<Vec<DenseMatrix<K>>>,
    complete: bool,
}

/// Degreewise linear map between graded modules (degree-preserving).
#[derive(Clone, Debug, PartialEq)]
pub struct GradedMap<K: Field> {
    pub maps: BTreeMap<i64, DenseMatrix<K>>,
}

impl<K: Field> GradedModule<K> {
    pub fn new(ring: &Ring<K>, lo: i64, dims: Vec<usize>, action: Vec<Vec<DenseMatrix<K>>>, complete: bool) -> Result<Self> {
        if action.len() != ring.nvars() {
            return Err(Error::DimensionMismatch(format!(
                "{} action families for {} variables",
                action.len(),
                ring.nvars()
            )));
        }
        for fam in &action {
            if fam.len() != dims.len().saturating_sub(1) {
                return Err(Error::DimensionMismatch("action family length".into()));
            }
            for (k, m) in fam.iter().enumerate() {
                if m.cols() != dims[k] || m.rows() != dims[k + 1] {
                    return Err(Error::DimensionMismatch(format!("action matrix at degree {}", lo + k as i64)));
                }
            }
        }
        let mut m = GradedModule { ring: ring.clone(), lo, dims, action, complete };
        if complete {
            m.trim();
        }
        Ok(m)
    }

    pub fn zero(ring: &Ring<K>) -> Self {
        GradedModule { ring: ring.clone(), lo: 0, dims: Vec::new(), action: vec![Vec::new(); ring.nvars()], complete: true }
    }

    /// Drop zero pieces at both ends of a complete module.
    fn trim(&mut self) {
        while self.dims.last() == Some(&0) {
            self.dims.pop();
            for fam in &mut self.action {
                fam.pop();
            }
        }
        while self.dims.first() == Some(&0) {
            self.dims.remove(0);
            for fam in &mut self.action {
                if !fam.is_empty() {
                    fam.remove(0);
                }
            }
            self.lo += 1;
        }
        if self.dims.is_empty() {
            self.lo = 0;
        }
    }

    pub fn ring(&self) -> &Ring<K> {
        &self.ring
    }
    pub fn field(&self) -> &K {
        self.ring.field()
    }
    pub fn is_complete(&self) -> bool {
        self.complete
    }
    pub fn lo(&self) -> i64 {
        self.lo
    }
    /// Last stored degree (`lo - 1` when empty).
    pub fn hi(&self) -> i64 {
        self.lo + self.dims.len() as i64 - 1
    }
    pub fn is_zero(&self) -> bool {
        self.complete && self.dims.iter().all(|&d| d == 0)
    }
    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi()
    }
    pub fn stores(&self, d: i64) -> bool {
        d >= self.lo && d <= self.hi()
    }
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn dim(&self, d: i64) -> usize {
        if self.stores(d) {
            self.dims[(d - self.lo) as usize]
        } else {
            0
        }
    }

    /// Dimension or an error if the degree lies outside a slice.
    pub fn dim_checked(&self, d: i64) -> Result<usize> {
        if self.stores(d) || self.complete {
            Ok(self.dim(d))
        } else {
            Err(Error::OutsideWindow(format!("degree {d} outside stored slice {}..{}", self.lo, self.hi())))
        }
    }

    /// Action of variable `i` from degree `d` to `d+1`.
    pub fn act(&self, i: usize, d: i64) -> Result<DenseMatrix<K>> {
        if self.stores(d) && self.stores(d + 1) {
            return Ok(self.action[i][(d - self.lo) as usize].clone());
        }
        if self.complete {
            return Ok(DenseMatrix::zeros(self.field(), self.dim(d + 1), self.dim(d)));
        }
        if self.dim(d) == 0 && self.stores(d) {
            return Err(Error::OutsideWindow(format!("degree {} outside stored slice", d + 1)));
        }
        Err(Error::OutsideWindow(format!("action at degree {d} outside stored slice")))
    }

    pub fn act_ref(&self, i: usize, d: i64) -> Option<&DenseMatrix<K>> {
        if self.stores(d) && self.stores(d + 1) {
            Some(&self.action[i][(d - self.lo) as usize])
        } else {
            None
        }
    }

    /// Action of a monomial: `e_{i1}...e_{ik}` applies `e_{ik}` first.
    pub fn act_monomial(&self, m: &Monomial, d: i64) -> Result<DenseMatrix<K>> {
        let idx = m.indices();
        let mut cur = DenseMatrix::identity(self.field(), self.dim_checked(d)?);
        let mut deg = d;
        for &i in idx.iter().rev() {
            cur = self.act(i, deg)?.dot(&cur);
            deg += 1;
        }
        Ok(cur)
    }

    pub fn act_elem(&self, x: &RingElem<K>, d: i64) -> Result<DenseMatrix<K>> {
        let e = x.degree().unwrap_or(0) as i64;
        let f = self.field();
        let mut out = DenseMatrix::zeros(f, self.dim_checked(d + e)?, self.dim_checked(d)?);
        for (m, c) in x.terms() {
            out = out.add(&self.act_monomial(m, d)?.scale(c))?;
        }
        Ok(out)
    }

    /// The module ⋀(V*) over the exterior algebra, in degrees -(n+1)..0,
    /// with the contraction action.
    pub fn contraction_module(ring: &Ring<K>) -> Self {
        assert_eq!(ring.kind(), RingKind::Exterior);
        let f = ring.field();
        let nv = ring.nvars();
        let lo = -(nv as i64);
        // degree -i carries the basis of i-subsets
        let bases: Vec<Vec<Monomial>> = (0..=nv).rev().map(|i| ring.basis(i as i64)).collect();
        let dims = bases.iter().map(|b| b.len()).collect();
        let mut action = vec![Vec::new(); nv];
        for (k, fam) in action.iter_mut().enumerate() {
            for idx in 0..nv {
                let src = &bases[idx];
                let tgt = &bases[idx + 1];
                let mut m = DenseMatrix::zeros(f, tgt.len(), src.len());
                for (j, jset) in src.iter().enumerate() {
                    if jset.0[k] == 0 {
                        continue;
                    }
                    let pos = jset.0[..k].iter().filter(|&&e| e == 1).count();
                    let mut rest = jset.clone();
                    rest.0[k] = 0;
                    let i = tgt.iter().position(|t| *t == rest).expect("subset present");
                    m.set(i, j, f.pow_neg_one(pos as i64));
                }
                fam.push(m);
            }
        }
        GradedModule::new(ring, lo, dims, action, true).expect("well-formed")
    }

    /// Ground-ring module: just the vector spaces.
    pub fn vector_spaces(ring: &Ring<K>, lo: i64, dims: Vec<usize>) -> Self {
        GradedModule { ring: ring.clone(), lo, dims, action: vec![Vec::new(); ring.nvars()], complete: true }
    }

    /// N(a)_p = N_{p+a}; over the exterior algebra the action picks up (-1)^a.
    pub fn twist(&self, a: i64) -> Self {
        let f = self.field();
        let sign = f.pow_neg_one(a);
        let flip = self.ring.kind() == RingKind::Exterior && a.rem_euclid(2) == 1;
        let action = self
            .action
            .iter()
            .map(|fam| fam.iter().map(|m| if flip { m.scale(&sign) } else { m.clone() }).collect())
            .collect();
        GradedModule { ring: self.ring.clone(), lo: self.lo - a, dims: self.dims.clone(), action, complete: self.complete }
    }

    /// Graded k-dual: (N*)_p = (N_{-p})*.
    pub fn dual(&self) -> Self {
        let f = self.field();
        let len = self.dims.len();
        let lo = -self.hi();
        let dims: Vec<usize> = self.dims.iter().rev().cloned().collect();
        let ext = self.ring.kind() == RingKind::Exterior;
        let action = self
            .action
            .iter()
            .map(|fam| {
                (0..len.saturating_sub(1))
                    .map(|k| {
                        let p = lo + k as i64;
                        // old action from -p-1 to -p
                        let old = &fam[(-p - 1 - self.lo) as usize];
                        let t = old.transpose();
                        if ext {
                            t.scale(&f.pow_neg_one(p + 1))
                        } else {
                            t
                        }
                    })
                    .collect()
            })
            .collect();
        GradedModule { ring: self.ring.clone(), lo, dims, action, complete: self.complete }
    }

    /// The canonical iso N → N** with μ_p = (-1)^p over the exterior algebra.
    pub fn double_dual_iso(&self) -> GradedMap<K> {
        let f = self.field();
        let ext = self.ring.kind() == RingKind::Exterior;
        let maps = self
            .degrees()
            .map(|d| {
                let id = DenseMatrix::identity(f, self.dim(d));
                (d, if ext { id.scale(&f.pow_neg_one(d)) } else { id })
            })
            .collect();
        GradedMap { maps }
    }

    /// α: N*(-a) → (N(a))* with α_p = (-1)^{(p-a)a}.
    pub fn twist_dual_iso(&self, a: i64) -> GradedMap<K> {
        let f = self.field();
        let src = self.dual().twist(-a);
        let maps = src
            .degrees()
            .map(|p| (p, DenseMatrix::identity(f, src.dim(p)).scale(&f.pow_neg_one((p - a) * a))))
            .collect();
        GradedMap { maps }
    }

    /// Checks the defining relations of the action on every stored degree.
    pub fn check_module(&self) -> Result<()> {
        let nv = self.ring.nvars();
        if self.ring.kind() == RingKind::Ground {
            return Ok(());
        }
        let exterior = self.ring.kind() == RingKind::Exterior;
        for d in self.lo..self.hi() - 1 {
            for i in 0..nv {
                for j in i..nv {
                    let a = self.action[j][(d + 1 - self.lo) as usize].dot(&self.action[i][(d - self.lo) as usize]);
                    let b = self.action[i][(d + 1 - self.lo) as usize].dot(&self.action[j][(d - self.lo) as usize]);
                    let ok = if exterior { a.add(&b)?.is_zero() } else { a == b };
                    ensure(ok, || format!("variables {i},{j} violate the relations at degree {d}"))?;
                }
            }
        }
        Ok(())
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.ring != other.ring {
            return Err(Error::InvalidInput("direct sum over different rings".into()));
        }
        if self.dims.is_empty() {
            return Ok(other.clone());
        }
        if other.dims.is_empty() {
            return Ok(self.clone());
        }
        let f = self.field();
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let complete = self.complete && other.complete;
        if !complete && (self.lo != other.lo || self.hi() != other.hi()) {
            return Err(Error::InvalidInput("direct sum of slices with different ranges".into()));
        }
        let dims = (lo..=hi).map(|d| self.dim(d) + other.dim(d)).collect();
        let action = (0..self.ring.nvars())
            .map(|i| {
                (lo..hi)
                    .map(|d| DenseMatrix::block_diag(f, &[self.act(i, d).unwrap(), other.act(i, d).unwrap()]))
                    .collect()
            })
            .collect();
        GradedModule::new(&self.ring, lo, dims, action, complete)
    }

    /// Restrict a slice or module to degrees `lo..=hi` (as a slice unless it covers all data).
    pub fn restrict(&self, lo: i64, hi: i64) -> Result<Self> {
        let f = self.field();
        if !self.complete && (lo < self.lo || hi > self.hi()) {
            return Err(Error::OutsideWindow(format!("restriction {lo}..{hi} exceeds slice")));
        }
        let dims = (lo..=hi).map(|d| self.dim(d)).collect();
        let action = (0..self.ring.nvars())
            .map(|i| (lo..hi).map(|d| self.act(i, d).unwrap_or_else(|_| DenseMatrix::zeros(f, self.dim(d + 1), self.dim(d)))).collect())
            .collect();
        let covers = self.complete && lo <= self.lo && hi >= self.hi();
        let mut m = GradedModule { ring: self.ring.clone(), lo, dims, action, complete: covers };
        if covers {
            m.trim();
        }
        Ok(m)
    }

    /// Mark a slice as complete: zero outside the stored range.
    pub fn into_complete(mut self) -> Self {
        self.complete = true;
        self.trim();
        self
    }

    /// Submodule spanned degreewise by the given column bases (must be closed under the action).
    pub fn submodule(&self, bases: &BTreeMap<i64, DenseMatrix<K>>) -> Result<(Self, GradedMap<K>)> {
        let f = self.field();
        let degs: Vec<i64> = self.degrees().collect();
        let basis = |d: i64| bases.get(&d).cloned().unwrap_or_else(|| DenseMatrix::zeros(f, self.dim(d), 0));
        let dims: Vec<usize> = degs.iter().map(|&d| basis(d).cols()).collect();
        let mut action = vec![Vec::new(); self.ring.nvars()];
        for (i, fam) in action.iter_mut().enumerate() {
            for &d in degs.iter().take(degs.len().saturating_sub(1)) {
                let img = self.act(i, d)?.dot(&basis(d));
                let sol = basis(d + 1)
                    .solve_matrix(&img)?
                    .ok_or_else(|| Error::Invariant(format!("subspace not closed under variable {i} at degree {d}")))?;
                fam.push(sol);
            }
        }
        let inclusion = GradedMap { maps: degs.iter().map(|&d| (d, basis(d))).collect() };
        Ok((GradedModule::new(&self.ring, self.lo, dims, action, self.complete)?, inclusion))
    }

    /// Quotient by a submodule given by degreewise column bases.
    pub fn quotient(&self, bases: &BTreeMap<i64, DenseMatrix<K>>) -> Result<(Self, GradedMap<K>)> {
        let f = self.field();
        let degs: Vec<i64> = self.degrees().collect();
        let q: BTreeMap<i64, crate::exactlin::Quotient<K>> = degs
            .iter()
            .map(|&d| {
                let b = bases.get(&d).cloned().unwrap_or_else(|| DenseMatrix::zeros(f, self.dim(d), 0));
                (d, crate::exactlin::Quotient::new(f, &b))
            })
            .collect();
        let dims = degs.iter().map(|d| q[d].dim()).collect();
        let mut action = vec![Vec::new(); self.ring.nvars()];
        for (i, fam) in action.iter_mut().enumerate() {
            for &d in degs.iter().take(degs.len().saturating_sub(1)) {
                fam.push(q[&(d + 1)].projection.dot(&self.act(i, d)?).dot(&q[&d].section(f)));
            }
        }
        let proj = GradedMap { maps: degs.iter().map(|d| (*d, q[d].projection.clone())).collect() };
        Ok((GradedModule::new(&self.ring, self.lo, dims, action, self.complete)?, proj))
    }

    /// Span of the images of all variables landing in degree `d`.
    pub fn augmentation_image(&self, d: i64) -> Result<DenseMatrix<K>> {
        let f = self.field();
        let mut m = DenseMatrix::zeros(f, self.dim(d), 0);
        for i in 0..self.ring.nvars() {
            if self.dim(d - 1) > 0 {
                m = m.hstack(&self.act(i, d - 1)?)?;
            }
        }
        Ok(m)
    }

    /// Minimal homogeneous generators as (degree, coordinate vector), ascending degree.
    /// Complement vectors are standard basis vectors, for determinism.
    pub fn minimal_generators(&self) -> Result<Vec<(i64, Vec<K::Elem>)>> {
        let f = self.field();
        let mut out = Vec::new();
        for d in self.degrees() {
            if self.dim(d) == 0 {
                continue;
            }
            let img = if d > self.lo { self.augmentation_image(d)? } else { DenseMatrix::zeros(f, self.dim(d), 0) };
            for c in img.complement_coordinates() {
                let mut v = vec![f.zero(); self.dim(d)];
                v[c] = f.one();
                out.push((d, v));
            }
        }
        Ok(out)
    }
}

/// Degreewise bases of the submodule generated by homogeneous vectors.
pub fn generated_submodule<K: Field>(m: &GradedModule<K>, gens: &[(i64, Vec<K::Elem>)]) -> Result<BTreeMap<i64, DenseMatrix<K>>> {
    let f = m.field();
    let mut out: BTreeMap<i64, DenseMatrix<K>> = BTreeMap::new();
    for d in m.degrees() {
        let mut span = DenseMatrix::zeros(f, m.dim(d), 0);
        for (gd, v) in gens {
            if *gd == d {
                span = span.hstack(&DenseMatrix::from_columns(f, m.dim(d), std::slice::from_ref(v)))?;
            }
        }
        if let Some(prev) = out.get(&(d - 1)) {
            if prev.cols() > 0 {
                for i in 0..m.ring().nvars() {
                    span = span.hstack(&m.act(i, d - 1)?.dot(prev))?;
                }
            }
        }
        out.insert(d, span.column_space());
    }
    Ok(out)
}

/// A basis of the degree-0 module maps `a → b` between complete modules.
pub fn hom_basis<K: Field>(a: &GradedModule<K>, b: &GradedModule<K>) -> Result<Vec<GradedMap<K>>> {
    let f = a.field();
    let degs: Vec<i64> = a.degrees().filter(|&d| a.dim(d) > 0 && b.dim(d) > 0).collect();
    let mut offset = BTreeMap::new();
    let mut total = 0;
    for &d in &degs {
        offset.insert(d, total);
        total += a.dim(d) * b.dim(d);
    }
    if total == 0 {
        return Ok(Vec::new());
    }
    // unknown (r, c) of φ_d sits at offset[d] + r * a.dim(d) + c
    let mut rows: Vec<Vec<K::Elem>> = Vec::new();
    for d in a.lo().min(b.lo()) - 1..=a.hi().max(b.hi()) {
        let (ad, ad1, bd, bd1) = (a.dim(d), a.dim(d + 1), b.dim(d), b.dim(d + 1));
        if bd1 == 0 || (ad == 0) {
            continue;
        }
        for i in 0..a.ring().nvars() {
            let (ai, bi) = (a.act(i, d)?, b.act(i, d)?);
            // φ_{d+1} a_i - b_i φ_d = 0, entry (r, c) with r < bd1, c < ad
            for r in 0..bd1 {
                for c in 0..ad {
                    let mut row = vec![f.zero(); total];
                    if let Some(&o) = offset.get(&(d + 1)) {
                        for k in 0..ad1 {
                            row[o + r * ad1 + k] = f.add(&row[o + r * ad1 + k], ai.get(k, c));
                        }
                    }
                    if let Some(&o) = offset.get(&d) {
                        for k in 0..bd {
                            row[o + k * ad + c] = f.sub(&row[o + k * ad + c], bi.get(r, k));
                        }
                    }
                    rows.push(row);
                }
            }
        }
    }
    let sys = DenseMatrix::from_fn(f, rows.len(), total, |r, c| rows[r][c].clone());
    let ker = sys.kernel_basis();
    Ok((0..ker.cols())
        .map(|j| {
            let v = ker.column(j);
            let maps = a
                .degrees()
                .chain(b.degrees())
                .map(|d| {
                    let m = match offset.get(&d) {
                        Some(&o) => DenseMatrix::from_fn(f, b.dim(d), a.dim(d), |r, c| v[o + r * a.dim(d) + c].clone()),
                        None => DenseMatrix::zeros(f, b.dim(d), a.dim(d)),
                    };
                    (d, m)
                })
                .collect();
            GradedMap { maps }
        })
        .collect())
}

impl<K: Field> GradedMap<K> {
    pub fn get(&self, d: i64) -> Option<&DenseMatrix<K>> {
        self.maps.get(&d)
    }

    /// Checks that this map commutes with the actions on every degree where both sides are stored.
    pub fn check_linear(&self, src: &GradedModule<K>, tgt: &GradedModule<K>) -> Result<()> {
        let f = src.field();
        let get = |d: i64| self.maps.get(&d).cloned().unwrap_or_else(|| DenseMatrix::zeros(f, tgt.dim(d), src.dim(d)));
        for d in src.lo().min(tgt.lo())..src.hi().max(tgt.hi()) {
            for i in 0..src.ring().nvars() {
                let (Ok(a), Ok(b)) = (src.act(i, d), tgt.act(i, d)) else { continue };
                let lhs = get(d + 1).mul(&a)?;
                let rhs = b.mul(&get(d))?;
                ensure(lhs == rhs, || format!("map does not commute with variable {i} at degree {d}"))?;
            }
        }
        Ok(())
    }

    pub fn compose(&self, after: &GradedMap<K>) -> Result<GradedMap<K>> {
        let mut maps = BTreeMap::new();
        for (d, m) in &self.maps {
            if let Some(a) = after.maps.get(d) {
                maps.insert(*d, a.mul(m)?);
            }
        }
        Ok(GradedMap { maps })
    }
}
