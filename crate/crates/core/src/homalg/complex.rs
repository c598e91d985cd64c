use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::free::{FreeModule, GradedMatrix};
use crate::error::{ensure, Error, Result};
use crate::exactlin::{DenseMatrix, Field};
use crate::rings::{Ring, RingKind};

/// Complex of graded free modules on positions `lo..=hi`; `d^p: C^p → C^{p+1}`.
///
/// A `bounded` complex is zero outside its window. Otherwise terms beyond the
/// window are unknown and queries there fail.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeComplex<K: Field> {
    ring: Ring<K>,
    lo: i64,
    terms: Vec<FreeModule<K>>,
    diffs: Vec<GradedMatrix<K>>,
    bounded: bool,
}

/// Ranks of free modules by position (columns) and generator degree (rows).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiTable {
    pub positions: Vec<i64>,
    pub rows: BTreeMap<i64, Vec<usize>>,
}

/// A degree-0 chain map between complexes on the same positions.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainMap<K: Field> {
    pub lo: i64,
    pub maps: Vec<GradedMatrix<K>>,
}

impl<K: Field> FreeComplex<K> {
    pub fn new(ring: &Ring<K>, lo: i64, terms: Vec<FreeModule<K>>, diffs: Vec<GradedMatrix<K>>, bounded: bool) -> Result<Self> {
        let c = FreeComplex { ring: ring.clone(), lo, terms, diffs, bounded };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.diffs.len() + 1 != self.terms.len() && !(self.terms.is_empty() && self.diffs.is_empty()) {
            return Err(Error::DimensionMismatch(format!(
                "{} terms with {} differentials",
                self.terms.len(),
                self.diffs.len()
            )));
        }
        for (k, d) in self.diffs.iter().enumerate() {
            ensure(d.source().gens() == self.terms[k].gens() && d.target().gens() == self.terms[k + 1].gens(), || {
                format!("differential at position {} has wrong modules", self.lo + k as i64)
            })?;
        }
        for k in 1..self.diffs.len() {
            let dd = self.diffs[k - 1].then(&self.diffs[k])?;
            ensure(dd.is_zero(), || format!("d∘d ≠ 0 at position {}", self.lo + k as i64 - 1))?;
        }
        Ok(())
    }

    pub fn zero(ring: &Ring<K>) -> Self {
        FreeComplex { ring: ring.clone(), lo: 0, terms: Vec::new(), diffs: Vec::new(), bounded: true }
    }

    /// One module in position p.
    pub fn single(m: &FreeModule<K>, p: i64) -> Self {
        FreeComplex { ring: m.ring().clone(), lo: p, terms: vec![m.clone()], diffs: Vec::new(), bounded: true }
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
        self.lo + self.terms.len() as i64 - 1
    }
    pub fn is_bounded(&self) -> bool {
        self.bounded
    }
    pub fn positions(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi()
    }
    pub fn stores(&self, p: i64) -> bool {
        p >= self.lo && p <= self.hi()
    }
    pub fn terms(&self) -> &[FreeModule<K>] {
        &self.terms
    }
    pub fn diffs(&self) -> &[GradedMatrix<K>] {
        &self.diffs
    }

    pub fn with_bounded(mut self, b: bool) -> Self {
        self.bounded = b;
        self
    }

    pub fn term(&self, p: i64) -> Result<FreeModule<K>> {
        if self.stores(p) {
            Ok(self.terms[(p - self.lo) as usize].clone())
        } else if self.bounded {
            Ok(FreeModule::zero(&self.ring))
        } else {
            Err(Error::OutsideWindow(format!("position {p} outside window {}..{}", self.lo, self.hi())))
        }
    }

    pub fn term_ref(&self, p: i64) -> Option<&FreeModule<K>> {
        self.stores(p).then(|| &self.terms[(p - self.lo) as usize])
    }

    /// `d^p: C^p → C^{p+1}`.
    pub fn diff(&self, p: i64) -> Result<GradedMatrix<K>> {
        if self.stores(p) && self.stores(p + 1) {
            return Ok(self.diffs[(p - self.lo) as usize].clone());
        }
        Ok(GradedMatrix::zero(&self.term(p)?, &self.term(p + 1)?))
    }

    pub fn diff_ref(&self, p: i64) -> Option<&GradedMatrix<K>> {
        (self.stores(p) && self.stores(p + 1)).then(|| &self.diffs[(p - self.lo) as usize])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.is_zero())
    }

    /// T^k C: (T^k C)^p = C^{p+k}, d multiplied by (-1)^k.
    pub fn translate(&self, k: i64) -> Self {
        let f = self.field();
        let s = f.pow_neg_one(k);
        FreeComplex {
            ring: self.ring.clone(),
            lo: self.lo - k,
            terms: self.terms.clone(),
            diffs: self.diffs.iter().map(|d| if k % 2 != 0 { d.scale(&s) } else { d.clone() }).collect(),
            bounded: self.bounded,
        }
    }

    /// Twist of every term. Over Λ entries of degree e pick up (-1)^{a e} and
    /// the differential (-1)^a.
    pub fn twist(&self, a: i64) -> Self {
        let ext = self.ring.kind() == RingKind::Exterior;
        let terms: Vec<_> = self.terms.iter().map(|t| t.twist(a)).collect();
        let diffs = self
            .diffs
            .iter()
            .enumerate()
            .map(|(k, d)| {
                let d = if ext { d.sign_by_degree(move |e| (a * (e as i64 + 1)).rem_euclid(2) == 1) } else { d.clone() };
                d.with_modules(&terms[k], &terms[k + 1]).expect("twist keeps degrees consistent")
            })
            .collect();
        FreeComplex { ring: self.ring.clone(), lo: self.lo, terms, diffs, bounded: self.bounded }
    }

    /// Hom into the ring over S: term p = (C^{-p})^∨, d^p = (-1)^{p+1} (d^{-p-1})^∨.
    pub fn dual(&self) -> Result<Self> {
        if self.ring.kind() == RingKind::Exterior {
            return Err(Error::Unsupported("Hom into Λ; use the graded k-dual of modules".into()));
        }
        let f = self.field();
        let lo = -self.hi();
        let terms: Vec<_> = self.terms.iter().rev().map(|t| t.dual()).collect();
        let diffs = (0..self.diffs.len())
            .map(|k| {
                let p = lo + k as i64;
                self.diff(-p - 1).map(|d| d.dual().scale(&f.pow_neg_one(p + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FreeComplex { ring: self.ring.clone(), lo, terms, diffs, bounded: self.bounded })
    }

    /// Restrict to positions `lo..=hi` (zero-filled where a bounded complex has nothing).
    pub fn window(&self, lo: i64, hi: i64) -> Result<Self> {
        let terms = (lo..=hi).map(|p| self.term(p)).collect::<Result<Vec<_>>>()?;
        let diffs = (lo..hi).map(|p| self.diff(p)).collect::<Result<Vec<_>>>()?;
        let bounded = self.bounded && lo <= self.lo && hi >= self.hi();
        Ok(FreeComplex { ring: self.ring.clone(), lo, terms, diffs, bounded })
    }

    /// Drop zero terms at both ends of a bounded complex.
    pub fn trimmed(&self) -> Self {
        if !self.bounded {
            return self.clone();
        }
        let nz: Vec<i64> = self.positions().filter(|&p| !self.term(p).unwrap().is_zero()).collect();
        match (nz.first(), nz.last()) {
            (Some(&a), Some(&b)) => self.window(a, b).unwrap().with_bounded(true),
            _ => FreeComplex::zero(&self.ring),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let a = self.window(lo, hi)?;
        let b = other.window(lo, hi)?;
        let terms: Vec<_> = a.terms.iter().zip(&b.terms).map(|(x, y)| x.direct_sum(y)).collect();
        let diffs = (0..a.diffs.len())
            .map(|k| {
                GradedMatrix::from_blocks(
                    &[a.terms[k].clone(), b.terms[k].clone()],
                    &[a.terms[k + 1].clone(), b.terms[k + 1].clone()],
                    &[vec![Some(a.diffs[k].clone()), None], vec![None, Some(b.diffs[k].clone())]],
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FreeComplex { ring: self.ring.clone(), lo, terms, diffs, bounded: self.bounded && other.bounded })
    }

    /// Mapping cone: Con(φ)^p = X^{p+1} ⊕ Y^p, d = [[-d_X, 0], [φ, d_Y]].
    pub fn cone(phi: &ChainMap<K>, x: &Self, y: &Self) -> Result<Self> {
        let lo = (x.lo - 1).min(y.lo);
        let hi = (x.hi() - 1).max(y.hi());
        let mut terms = Vec::new();
        let mut diffs = Vec::new();
        for p in lo..=hi {
            terms.push(x.term(p + 1)?.direct_sum(&y.term(p)?));
        }
        for p in lo..hi {
            let blocks = vec![
                vec![Some(x.diff(p + 1)?.neg()), None],
                vec![Some(phi.at(p + 1, &x.term(p + 1)?, &y.term(p + 1)?)), Some(y.diff(p)?)],
            ];
            diffs.push(GradedMatrix::from_blocks(&[x.term(p + 1)?, y.term(p)?], &[x.term(p + 2)?, y.term(p + 1)?], &blocks)?);
        }
        FreeComplex::new(&x.ring, lo, terms, diffs, x.bounded && y.bounded)
    }

    /// The complex of vector spaces in internal degree d.
    pub fn slice(&self, d: i64) -> Vec<DenseMatrix<K>> {
        self.diffs.iter().map(|m| m.slice(d)).collect()
    }

    /// dim H^p in internal degree d.
    pub fn homology_dim(&self, p: i64, d: i64) -> Result<usize> {
        let cur = self.term(p)?;
        let (prev, next) = (self.term(p - 1)?, self.term(p + 1)?);
        let dim = cur.dim(d);
        let out_rank = if next.is_zero() { 0 } else { self.diff(p)?.slice(d).rank() };
        let in_rank = if prev.is_zero() { 0 } else { self.diff(p - 1)?.slice(d).rank() };
        Ok(dim - out_rank - in_rank)
    }

    /// Internal degree range carrying data at positions p-1..=p+1, when finite.
    pub fn degree_span_near(&self, p: i64) -> Option<(i64, i64)> {
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for q in p - 1..=p + 1 {
            if let Ok(t) = self.term(q) {
                if let Some((a, b)) = t.degree_span() {
                    lo = lo.min(a);
                    hi = hi.max(b);
                }
            }
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Homology dimensions at p for every internal degree (Λ or ground complexes).
    pub fn homology_all(&self, p: i64) -> Result<BTreeMap<i64, usize>> {
        if self.ring.kind() == RingKind::Symmetric {
            return Err(Error::Unsupported("S-complexes need an explicit degree range".into()));
        }
        let mut out = BTreeMap::new();
        if let Some((a, b)) = self.degree_span_near(p) {
            for d in a..=b {
                let h = self.homology_dim(p, d)?;
                if h > 0 {
                    out.insert(d, h);
                }
            }
        }
        Ok(out)
    }

    pub fn homology_range(&self, p: i64, lo: i64, hi: i64) -> Result<BTreeMap<i64, usize>> {
        let mut out = BTreeMap::new();
        for d in lo..=hi {
            let h = self.homology_dim(p, d)?;
            if h > 0 {
                out.insert(d, h);
            }
        }
        Ok(out)
    }

    pub fn is_minimal(&self) -> bool {
        self.diffs.iter().all(|d| d.is_minimal())
    }

    pub fn betti(&self) -> BettiTable {
        let positions: Vec<i64> = self.positions().collect();
        let mut rows: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (k, t) in self.terms.iter().enumerate() {
            for g in t.gens() {
                rows.entry(*g).or_insert_with(|| vec![0; positions.len()])[k] += 1;
            }
        }
        BettiTable { positions, rows }
    }
}

impl<K: Field> ChainMap<K> {
    /// Component at position p, zero when not stored.
    pub fn at(&self, p: i64, src: &FreeModule<K>, tgt: &FreeModule<K>) -> GradedMatrix<K> {
        let k = p - self.lo;
        if k >= 0 && (k as usize) < self.maps.len() {
            self.maps[k as usize].clone()
        } else {
            GradedMatrix::zero(src, tgt)
        }
    }

    /// Checks `d_Y φ = φ d_X` on every stored position.
    pub fn check(&self, x: &FreeComplex<K>, y: &FreeComplex<K>) -> Result<()> {
        let lo = x.lo.min(y.lo) - 1;
        let hi = x.hi().max(y.hi());
        for p in lo..=hi {
            let (Ok(xp), Ok(xq), Ok(yp), Ok(yq)) = (x.term(p), x.term(p + 1), y.term(p), y.term(p + 1)) else {
                continue;
            };
            let a = self.at(p, &xp, &yp).then(&y.diff(p)?)?;
            let b = x.diff(p)?.then(&self.at(p + 1, &xq, &yq))?;
            ensure(a == b, || format!("not a chain map at position {p}"))?;
        }
        Ok(())
    }
}

impl BettiTable {
    /// Plain-text table: one line per degree, ranks by position.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let w = 6;
        s.push_str(&format!("{:>w$} |", "deg"));
        for p in &self.positions {
            s.push_str(&format!("{p:>w$}"));
        }
        s.push('\n');
        for (d, r) in &self.rows {
            s.push_str(&format!("{d:>w$} |"));
            for v in r {
                if *v == 0 {
                    s.push_str(&format!("{:>w$}", "."));
                } else {
                    s.push_str(&format!("{v:>w$}"));
                }
            }
            s.push('\n');
        }
        s
    }
}

/// Double complex of free modules with commuting squares.
/// `dh(p,q): X^{pq} → X^{p+1,q}`, `dv(p,q): X^{pq} → X^{p,q+1}`.
#[derive(Clone, Debug)]
pub struct DoubleComplex<K: Field> {
    pub ring: Ring<K>,
    pub terms: BTreeMap<(i64, i64), FreeModule<K>>,
    pub dh: BTreeMap<(i64, i64), GradedMatrix<K>>,
    pub dv: BTreeMap<(i64, i64), GradedMatrix<K>>,
}

/// Where each (p, q) summand sits inside a term of the total complex.
#[derive(Clone, Debug, PartialEq)]
pub struct TotLayout {
    pub lo: i64,
    /// For each total position, the list of (p, q, first generator index, rank), p ascending.
    pub blocks: Vec<Vec<(i64, i64, usize, usize)>>,
}

impl TotLayout {
    pub fn blocks_at(&self, m: i64) -> &[(i64, i64, usize, usize)] {
        let k = m - self.lo;
        if k < 0 || k as usize >= self.blocks.len() {
            &[]
        } else {
            &self.blocks[k as usize]
        }
    }
}

impl<K: Field> DoubleComplex<K> {
    pub fn new(ring: &Ring<K>) -> Self {
        DoubleComplex { ring: ring.clone(), terms: BTreeMap::new(), dh: BTreeMap::new(), dv: BTreeMap::new() }
    }

    pub fn term(&self, p: i64, q: i64) -> FreeModule<K> {
        self.terms.get(&(p, q)).cloned().unwrap_or_else(|| FreeModule::zero(&self.ring))
    }

    pub fn h(&self, p: i64, q: i64) -> GradedMatrix<K> {
        self.dh.get(&(p, q)).cloned().unwrap_or_else(|| GradedMatrix::zero(&self.term(p, q), &self.term(p + 1, q)))
    }

    pub fn v(&self, p: i64, q: i64) -> GradedMatrix<K> {
        self.dv.get(&(p, q)).cloned().unwrap_or_else(|| GradedMatrix::zero(&self.term(p, q), &self.term(p, q + 1)))
    }

    pub fn check(&self) -> Result<()> {
        for &(p, q) in self.terms.keys() {
            ensure(self.h(p, q).then(&self.h(p + 1, q))?.is_zero(), || format!("d'² ≠ 0 at ({p},{q})"))?;
            ensure(self.v(p, q).then(&self.v(p, q + 1))?.is_zero(), || format!("d''² ≠ 0 at ({p},{q})"))?;
            let a = self.h(p, q).then(&self.v(p + 1, q))?;
            let b = self.v(p, q).then(&self.h(p, q + 1))?;
            ensure(a == b, || format!("square at ({p},{q}) does not commute"))?;
        }
        Ok(())
    }

    /// Total complex with differential d' + (-1)^p d''.
    pub fn total(&self) -> Result<(FreeComplex<K>, TotLayout)> {
        let nz: Vec<(i64, i64)> = self.terms.iter().filter(|(_, m)| !m.is_zero()).map(|(k, _)| *k).collect();
        if nz.is_empty() {
            return Ok((FreeComplex::zero(&self.ring), TotLayout { lo: 0, blocks: Vec::new() }));
        }
        let lo = nz.iter().map(|(p, q)| p + q).min().unwrap();
        let hi = nz.iter().map(|(p, q)| p + q).max().unwrap();
        let f = self.ring.field();
        let mut layout = TotLayout { lo, blocks: Vec::new() };
        let mut terms = Vec::new();
        for m in lo..=hi {
            let mut blocks = Vec::new();
            let mut gens = Vec::new();
            for &(p, q) in nz.iter().filter(|(p, q)| p + q == m) {
                let t = &self.terms[&(p, q)];
                blocks.push((p, q, gens.len(), t.rank()));
                gens.extend_from_slice(t.gens());
            }
            layout.blocks.push(blocks);
            terms.push(FreeModule::new(&self.ring, gens));
        }
        let mut diffs = Vec::new();
        for m in lo..hi {
            let src = &terms[(m - lo) as usize];
            let tgt = &terms[(m + 1 - lo) as usize];
            let mut d = GradedMatrix::zero(src, tgt);
            for &(p, q, c0, cr) in layout.blocks_at(m) {
                for &(p2, q2, r0, rr) in layout.blocks_at(m + 1) {
                    let block = if p2 == p + 1 && q2 == q {
                        Some(self.h(p, q))
                    } else if p2 == p && q2 == q + 1 {
                        Some(self.v(p, q).scale(&f.pow_neg_one(p)))
                    } else {
                        None
                    };
                    if let Some(b) = block {
                        for i in 0..rr {
                            for j in 0..cr {
                                d.set_entry(r0 + i, c0 + j, b.entry(i, j).clone())?;
                            }
                        }
                    }
                }
            }
            diffs.push(d);
        }
        Ok((FreeComplex::new(&self.ring, lo, terms, diffs, true)?, layout))
    }
}
