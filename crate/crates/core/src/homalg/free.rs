use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exactlin::{DenseMatrix, Field};
use crate::rings::{GradedModule, Monomial, Ring, RingElem, RingKind};

/// A graded free module given by the internal degrees of its generators.
///
/// Over S the summand S(a) has its generator in degree -a. Over Λ a generator
/// in degree δ spans a copy of Λ(-δ).
#[derive(Clone, Debug, PartialEq)]
pub struct FreeModule<K: Field> {
    ring: Ring<K>,
    gens: Vec<i64>,
}

impl<K: Field> FreeModule<K> {
    pub fn new(ring: &Ring<K>, gens: Vec<i64>) -> Self {
        FreeModule { ring: ring.clone(), gens }
    }

    pub fn zero(ring: &Ring<K>) -> Self {
        Self::new(ring, Vec::new())
    }

    pub fn ring(&self) -> &Ring<K> {
        &self.ring
    }
    pub fn field(&self) -> &K {
        self.ring.field()
    }
    pub fn gens(&self) -> &[i64] {
        &self.gens
    }
    pub fn rank(&self) -> usize {
        self.gens.len()
    }
    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn dim(&self, d: i64) -> usize {
        self.gens.iter().map(|g| self.ring.dim(d - g)).sum()
    }

    /// Basis of the degree-d piece: generator-major, monomials in canonical order.
    pub fn basis(&self, d: i64) -> Vec<(usize, Monomial)> {
        let mut out = Vec::new();
        for (j, g) in self.gens.iter().enumerate() {
            for m in self.ring.basis(d - g) {
                out.push((j, m));
            }
        }
        out
    }

    pub fn basis_index(&self, d: i64) -> HashMap<(usize, Monomial), usize> {
        self.basis(d).into_iter().enumerate().map(|(i, k)| (k, i)).collect()
    }

    /// Offsets of each generator block in the degree-d piece.
    pub fn offsets(&self, d: i64) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.gens.len());
        let mut acc = 0;
        for g in &self.gens {
            off.push(acc);
            acc += self.ring.dim(d - g);
        }
        off
    }

    /// Range of degrees with nonzero pieces, when finite.
    pub fn degree_span(&self) -> Option<(i64, i64)> {
        let lo = *self.gens.iter().min()?;
        let hi = *self.gens.iter().max()?;
        let top = self.ring.top_degree()? as i64;
        Some((lo, hi + top))
    }

    pub fn min_gen(&self) -> Option<i64> {
        self.gens.iter().min().copied()
    }
    pub fn max_gen(&self) -> Option<i64> {
        self.gens.iter().max().copied()
    }

    /// Shift of all generator degrees: over S this is M ↦ M(a).
    pub fn twist(&self, a: i64) -> Self {
        Self::new(&self.ring, self.gens.iter().map(|g| g - a).collect())
    }

    /// Hom into the ring: generators negated.
    pub fn dual(&self) -> Self {
        Self::new(&self.ring, self.gens.iter().map(|g| -g).collect())
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut g = self.gens.clone();
        g.extend_from_slice(&other.gens);
        Self::new(&self.ring, g)
    }

    pub fn select(&self, idx: &[usize]) -> Self {
        Self::new(&self.ring, idx.iter().map(|&i| self.gens[i]).collect())
    }

    /// Coordinates of a degree-d vector as ring elements, one per generator.
    pub fn vector_to_elems(&self, d: i64, v: &[K::Elem]) -> Vec<RingElem<K>> {
        let f = self.field();
        let mut out = Vec::with_capacity(self.gens.len());
        let mut pos = 0;
        for g in &self.gens {
            let b = self.ring.basis(d - g);
            let terms: Vec<(Monomial, K::Elem)> =
                b.into_iter().zip(&v[pos..]).filter(|(_, c)| !f.is_zero(c)).map(|(m, c)| (m, c.clone())).collect();
            pos += self.ring.dim(d - g);
            out.push(self.ring.from_terms(terms).expect("basis monomials"));
        }
        out
    }

    /// Inverse of `vector_to_elems` for homogeneous data of degree d.
    pub fn elems_to_vector(&self, d: i64, elems: &[RingElem<K>]) -> Vec<K::Elem> {
        let f = self.field();
        let mut v = vec![f.zero(); self.dim(d)];
        let off = self.offsets(d);
        for (j, e) in elems.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            let idx = self.ring.basis_index(d - self.gens[j]);
            for (m, c) in e.terms() {
                v[off[j] + idx[m]] = c.clone();
            }
        }
        v
    }

    /// Multiplication by a homogeneous ring element from degree d.
    pub fn mult_map(&self, x: &RingElem<K>, d: i64) -> Result<DenseMatrix<K>> {
        let blocks: Result<Vec<_>> = self.gens.iter().map(|g| self.ring.mult_map(x, d - g)).collect();
        Ok(DenseMatrix::block_diag(self.field(), &blocks?))
    }

    /// The module structure on degrees `lo..=hi`; complete when the range covers
    /// every nonzero piece.
    pub fn graded_module(&self, lo: i64, hi: i64) -> Result<GradedModule<K>> {
        let f = self.field();
        let dims: Vec<usize> = (lo..=hi).map(|d| self.dim(d)).collect();
        let nv = self.ring.nvars();
        let mut action = vec![Vec::new(); nv];
        for (i, fam) in action.iter_mut().enumerate() {
            let x = self.ring.var(i);
            for d in lo..hi {
                fam.push(self.mult_map(&x, d)?);
            }
        }
        let complete = match self.degree_span() {
            None => true,
            Some((a, b)) => self.ring.kind() != RingKind::Symmetric && lo <= a && hi >= b,
        };
        let _ = f;
        GradedModule::new(&self.ring, lo, dims, action, complete)
    }

    /// Full module structure of a free module over Λ or the ground field.
    pub fn full_module(&self) -> Result<GradedModule<K>> {
        match self.degree_span() {
            None => Ok(GradedModule::zero(&self.ring)),
            Some((a, b)) => {
                if self.ring.kind() == RingKind::Symmetric {
                    return Err(Error::Unsupported("free S-modules are infinite; use a slice".into()));
                }
                self.graded_module(a, b)
            }
        }
    }
}

/// A degree-preserving map of graded free modules; entry (i, j) is the
/// coefficient of target generator i in the image of source generator j.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedMatrix<K: Field> {
    source: FreeModule<K>,
    target: FreeModule<K>,
    entries: Vec<RingElem<K>>,
}

impl<K: Field> GradedMatrix<K> {
    pub fn new(source: &FreeModule<K>, target: &FreeModule<K>, entries: Vec<RingElem<K>>) -> Result<Self> {
        if entries.len() != source.rank() * target.rank() {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                target.rank(),
                source.rank()
            )));
        }
        let m = GradedMatrix { source: source.clone(), target: target.clone(), entries };
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let e = m.entry(i, j);
                if e.is_zero() {
                    continue;
                }
                let want = source.gens()[j] - target.gens()[i];
                if !e.is_homogeneous() || e.degree().map(|x| x as i64) != Some(want) {
                    return Err(Error::InvalidInput(format!(
                        "entry ({i},{j}) is not homogeneous of degree {want}"
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn zero(source: &FreeModule<K>, target: &FreeModule<K>) -> Self {
        GradedMatrix {
            source: source.clone(),
            target: target.clone(),
            entries: vec![RingElem::zero(); source.rank() * target.rank()],
        }
    }

    pub fn identity(m: &FreeModule<K>) -> Self {
        let mut out = Self::zero(m, m);
        for i in 0..m.rank() {
            out.entries[i * m.rank() + i] = m.ring().one();
        }
        out
    }

    /// Matrix with constant entries; nonzero scalars must join generators of equal degree.
    pub fn from_scalar(source: &FreeModule<K>, target: &FreeModule<K>, m: &DenseMatrix<K>) -> Result<Self> {
        if m.rows() != target.rank() || m.cols() != source.rank() {
            return Err(Error::DimensionMismatch("scalar matrix shape".into()));
        }
        let ring = source.ring();
        let mut entries = Vec::with_capacity(m.rows() * m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                entries.push(ring.constant(m.get(i, j).clone()));
            }
        }
        Self::new(source, target, entries)
    }

    pub fn source(&self) -> &FreeModule<K> {
        &self.source
    }
    pub fn target(&self) -> &FreeModule<K> {
        &self.target
    }
    pub fn ring(&self) -> &Ring<K> {
        self.source.ring()
    }
    pub fn rows(&self) -> usize {
        self.target.rank()
    }
    pub fn cols(&self) -> usize {
        self.source.rank()
    }

    pub fn entry(&self, i: usize, j: usize) -> &RingElem<K> {
        &self.entries[i * self.cols() + j]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, e: RingElem<K>) -> Result<()> {
        if !e.is_zero() {
            let want = self.source.gens()[j] - self.target.gens()[i];
            if !e.is_homogeneous() || e.degree().map(|x| x as i64) != Some(want) {
                return Err(Error::InvalidInput(format!("entry ({i},{j}) must have degree {want}")));
            }
        }
        let c = self.cols();
        self.entries[i * c + j] = e;
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// The linear map in internal degree d, in the bases of `FreeModule::basis`.
    pub fn slice(&self, d: i64) -> DenseMatrix<K> {
        let ring = self.ring();
        let f = ring.field();
        let src = self.source.basis(d);
        let toff = self.target.offsets(d);
        let mut idx_cache: HashMap<i64, HashMap<Monomial, usize>> = HashMap::new();
        let mut out = DenseMatrix::zeros(f, self.target.dim(d), src.len());
        for (col, (j, m)) in src.iter().enumerate() {
            for i in 0..self.rows() {
                let e = self.entry(i, *j);
                if e.is_zero() {
                    continue;
                }
                let tdeg = d - self.target.gens()[i];
                let idx = idx_cache.entry(tdeg).or_insert_with(|| ring.basis_index(tdeg));
                for (t, c) in e.terms() {
                    if let Some((p, neg)) = ring.mono_mul(m, t) {
                        let r = toff[i] + idx[&p];
                        let v = if neg { f.neg(c) } else { c.clone() };
                        out.set(r, col, f.add(out.get(r, col), &v));
                    }
                }
            }
        }
        out
    }

    /// `after ∘ self`.
    pub fn then(&self, after: &GradedMatrix<K>) -> Result<GradedMatrix<K>> {
        if after.source.gens() != self.target.gens() {
            return Err(Error::DimensionMismatch("composition of incompatible maps".into()));
        }
        let ring = self.ring();
        let mut out = GradedMatrix::zero(&self.source, &after.target);
        for k in 0..after.rows() {
            for j in 0..self.cols() {
                let mut acc = RingElem::zero();
                for i in 0..self.rows() {
                    let a = self.entry(i, j);
                    let b = after.entry(k, i);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = ring.add(&acc, &ring.mul(a, b));
                }
                out.entries[k * self.cols() + j] = acc;
            }
        }
        Ok(out)
    }

    fn zip(&self, other: &Self, op: impl Fn(&RingElem<K>, &RingElem<K>) -> RingElem<K>) -> Result<Self> {
        if self.source.gens() != other.source.gens() || self.target.gens() != other.target.gens() {
            return Err(Error::DimensionMismatch("sum of maps between different modules".into()));
        }
        Ok(GradedMatrix {
            source: self.source.clone(),
            target: self.target.clone(),
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| op(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let r = self.ring().clone();
        self.zip(other, |a, b| r.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let r = self.ring().clone();
        self.zip(other, |a, b| r.sub(a, b))
    }

    pub fn neg(&self) -> Self {
        let r = self.ring();
        GradedMatrix {
            source: self.source.clone(),
            target: self.target.clone(),
            entries: self.entries.iter().map(|e| r.neg(e)).collect(),
        }
    }

    pub fn scale(&self, s: &K::Elem) -> Self {
        let r = self.ring();
        GradedMatrix {
            source: self.source.clone(),
            target: self.target.clone(),
            entries: self.entries.iter().map(|e| r.scale(e, s)).collect(),
        }
    }

    /// Hom into the ring, over a commutative ring: transpose with dual modules.
    pub fn dual(&self) -> Self {
        let (r, c) = (self.rows(), self.cols());
        let mut entries = Vec::with_capacity(r * c);
        for j in 0..c {
            for i in 0..r {
                entries.push(self.entry(i, j).clone());
            }
        }
        GradedMatrix { source: self.target.dual(), target: self.source.dual(), entries }
    }

    /// Same entries between twisted modules (over S: φ(a)).
    pub fn twist_modules(&self, a: i64) -> Self {
        GradedMatrix { source: self.source.twist(a), target: self.target.twist(a), entries: self.entries.clone() }
    }

    /// Multiply every entry term of degree e by (-1)^{s(e)}.
    pub fn sign_by_degree(&self, s: impl Fn(usize) -> bool + Copy) -> Self {
        let r = self.ring();
        GradedMatrix {
            source: self.source.clone(),
            target: self.target.clone(),
            entries: self.entries.iter().map(|e| r.map_sign_by_degree(e, s)).collect(),
        }
    }

    pub fn with_modules(&self, source: &FreeModule<K>, target: &FreeModule<K>) -> Result<Self> {
        Self::new(source, target, self.entries.clone())
    }

    /// Constant (degree-0) coefficients.
    pub fn scalar_part(&self) -> DenseMatrix<K> {
        let f = self.ring().field();
        DenseMatrix::from_fn(f, self.rows(), self.cols(), |i, j| {
            self.entry(i, j).constant().cloned().unwrap_or_else(|| f.zero())
        })
    }

    /// True when no entry has a nonzero constant term.
    pub fn is_minimal(&self) -> bool {
        self.entries.iter().all(|e| e.constant().is_none())
    }

    /// Entries of positive degree only.
    pub fn without_units(&self) -> Self {
        let r = self.ring();
        GradedMatrix {
            source: self.source.clone(),
            target: self.target.clone(),
            entries: self
                .entries
                .iter()
                .map(|e| {
                    let t: Vec<_> = e.terms().iter().filter(|(m, _)| m.degree() > 0).cloned().collect();
                    r.from_terms(t).expect("valid terms")
                })
                .collect(),
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                entries.push(self.entry(i, j).clone());
            }
        }
        GradedMatrix { source: self.source.select(cols), target: self.target.select(rows), entries }
    }

    /// Block matrix from a grid; `blocks[r][c]` maps source part c to target part r.
    pub fn from_blocks(sources: &[FreeModule<K>], targets: &[FreeModule<K>], blocks: &[Vec<Option<GradedMatrix<K>>>]) -> Result<Self> {
        let ring = sources.first().or(targets.first()).map(|m| m.ring().clone());
        let Some(ring) = ring else {
            return Err(Error::InvalidInput("empty block matrix".into()));
        };
        let mut src = FreeModule::zero(&ring);
        for s in sources {
            src = src.direct_sum(s);
        }
        let mut tgt = FreeModule::zero(&ring);
        for t in targets {
            tgt = tgt.direct_sum(t);
        }
        let mut out = GradedMatrix::zero(&src, &tgt);
        let mut r0 = 0;
        for (r, t) in targets.iter().enumerate() {
            let mut c0 = 0;
            for (c, s) in sources.iter().enumerate() {
                if let Some(b) = &blocks[r][c] {
                    if b.rows() != t.rank() || b.cols() != s.rank() {
                        return Err(Error::DimensionMismatch(format!("block ({r},{c})")));
                    }
                    for i in 0..b.rows() {
                        for j in 0..b.cols() {
                            out.entries[(r0 + i) * src.rank() + c0 + j] = b.entry(i, j).clone();
                        }
                    }
                }
                c0 += s.rank();
            }
            r0 += t.rank();
        }
        Ok(out)
    }

    /// Lift: find χ with `self ∘ χ = phi`, column by column, degreewise.
    pub fn lift(&self, phi: &GradedMatrix<K>) -> Result<Option<GradedMatrix<K>>> {
        if phi.target.gens() != self.target.gens() {
            return Err(Error::DimensionMismatch("lift through a map with a different target".into()));
        }
        let mut out = GradedMatrix::zero(&phi.source, &self.source);
        let mut by_degree: HashMap<i64, Vec<usize>> = HashMap::new();
        for (j, g) in phi.source.gens().iter().enumerate() {
            by_degree.entry(*g).or_default().push(j);
        }
        let mut degs: Vec<_> = by_degree.keys().copied().collect();
        degs.sort();
        for d in degs {
            let cols = &by_degree[&d];
            let a = self.slice(d);
            let rhs_cols: Vec<Vec<K::Elem>> = cols
                .iter()
                .map(|&j| {
                    let col: Vec<RingElem<K>> = (0..phi.rows()).map(|i| phi.entry(i, j).clone()).collect();
                    self.target.elems_to_vector(d, &col)
                })
                .collect();
            let b = DenseMatrix::from_columns(self.ring().field(), a.rows(), &rhs_cols);
            let Some(x) = a.solve_matrix(&b)? else { return Ok(None) };
            for (k, &j) in cols.iter().enumerate() {
                let elems = self.source.vector_to_elems(d, &x.column(k));
                for (i, e) in elems.into_iter().enumerate() {
                    out.entries[i * phi.cols() + j] = e;
                }
            }
        }
        Ok(Some(out))
    }

    /// Textual rendering, one row per line.
    pub fn format(&self) -> Vec<Vec<String>> {
        (0..self.rows()).map(|i| (0..self.cols()).map(|j| self.ring().format(self.entry(i, j))).collect()).collect()
    }
}
