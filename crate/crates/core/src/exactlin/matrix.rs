use std::fmt;

use super::field::Field;
use crate::error::{Error, Result};

/// Dense row-major matrix over a field.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix<K: Field> {
    field: K,
    rows: usize,
    cols: usize,
    data: Vec<K::Elem>,
}

/// Result of row reduction.
#[derive(Clone, Debug, PartialEq)]
pub struct Rref<K: Field> {
    pub rank: usize,
    pub reduced: DenseMatrix<K>,
    pub pivot_cols: Vec<usize>,
}

impl<K: Field> fmt::Debug for DenseMatrix<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} over {}", self.rows, self.cols, self.field.name())?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.field.format(self.get(r, c))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<K: Field> DenseMatrix<K> {
    pub fn zeros(field: &K, rows: usize, cols: usize) -> Self {
        DenseMatrix { field: field.clone(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &K, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    pub fn from_vec(field: &K, rows: usize, cols: usize, data: Vec<K::Elem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(DenseMatrix { field: field.clone(), rows, cols, data })
    }

    pub fn from_i64_rows(field: &K, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(field, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, field.from_i64(*v));
            }
        }
        m
    }

    pub fn from_fn(field: &K, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> K::Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        DenseMatrix { field: field.clone(), rows, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(field: &K, rows: usize, columns: &[Vec<K::Elem>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn field(&self) -> &K {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn entries(&self) -> &[K::Elem] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &K::Elem {
        &self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: K::Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[K::Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<K::Elem> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.field, self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                let orow = other.row(k);
                let base = i * out.cols;
                for (j, b) in orow.iter().enumerate() {
                    if !f.is_zero(b) {
                        out.data[base + j] = f.mul_add(&out.data[base + j], a, b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Product with shapes already known to agree; panics otherwise.
    pub fn dot(&self, other: &Self) -> Self {
        self.mul(other).expect("matrix shapes agree")
    }

    pub fn mul_vec(&self, v: &[K::Elem]) -> Result<Vec<K::Elem>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|r| {
                let mut acc = f.zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !f.is_zero(a) && !f.is_zero(b) {
                        acc = f.mul_add(&acc, a, b);
                    }
                }
                acc
            })
            .collect())
    }

    fn zip_with(&self, other: &Self, op: impl Fn(&K::Elem, &K::Elem) -> K::Elem) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} against {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| op(a, b)).collect();
        Ok(DenseMatrix { field: self.field.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let f = self.field.clone();
        self.zip_with(other, |a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let f = self.field.clone();
        self.zip_with(other, |a, b| f.sub(a, b))
    }

    pub fn neg(&self) -> Self {
        let data = self.data.iter().map(|a| self.field.neg(a)).collect();
        DenseMatrix { field: self.field.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: &K::Elem) -> Self {
        let data = self.data.iter().map(|a| self.field.mul(a, s)).collect();
        DenseMatrix { field: self.field.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(&self.field, idx.len(), self.cols, |r, c| self.get(idx[r], c).clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Self::from_fn(&self.field, self.rows, idx.len(), |r, c| self.get(r, idx[c]).clone())
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!("hstack of {} and {} rows", self.rows, other.rows)));
        }
        let c = self.cols;
        Ok(Self::from_fn(&self.field, self.rows, c + other.cols, |r, j| {
            if j < c {
                self.get(r, j).clone()
            } else {
                other.get(r, j - c).clone()
            }
        }))
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!("vstack of {} and {} columns", self.cols, other.cols)));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(DenseMatrix { field: self.field.clone(), rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// Block diagonal matrix.
    pub fn block_diag(field: &K, blocks: &[Self]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(field, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            m.set_block(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols, "block out of range");
        for r in 0..b.rows {
            for c in 0..b.cols {
                self.set(r0 + r, c0 + c, b.get(r, c).clone());
            }
        }
    }

    pub fn block(&self, r0: usize, rows: usize, c0: usize, cols: usize) -> Self {
        Self::from_fn(&self.field, rows, cols, |r, c| self.get(r0 + r, c0 + c).clone())
    }

    /// Row reduction with deterministic pivoting: first nonzero entry in column order.
    pub fn rref(&self) -> Rref<K> {
        self.rref_impl(None).0
    }

    /// Row reduction that also returns the invertible `t` with `t * self = reduced`.
    pub fn rref_with_transform(&self) -> (Rref<K>, Self) {
        let (r, t) = self.rref_impl(Some(Self::identity(&self.field, self.rows)));
        (r, t.expect("transform tracked"))
    }

    fn rref_impl(&self, mut t: Option<Self>) -> (Rref<K>, Option<Self>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut prow = 0;
        for col in 0..m.cols {
            if prow == m.rows {
                break;
            }
            let Some(sel) = (prow..m.rows).find(|&r| !f.is_zero(m.get(r, col))) else {
                continue;
            };
            if sel != prow {
                m.swap_rows(sel, prow);
                if let Some(t) = t.as_mut() {
                    t.swap_rows(sel, prow);
                }
            }
            let inv = f.inv(m.get(prow, col)).expect("nonzero pivot");
            m.scale_row(prow, &inv, col);
            if let Some(t) = t.as_mut() {
                t.scale_row(prow, &inv, 0);
            }
            for r in 0..m.rows {
                if r == prow {
                    continue;
                }
                let factor = m.get(r, col).clone();
                if f.is_zero(&factor) {
                    continue;
                }
                m.axpy_row(r, prow, &factor, col);
                if let Some(t) = t.as_mut() {
                    t.axpy_row(r, prow, &factor, 0);
                }
            }
            pivots.push(col);
            prow += 1;
        }
        (Rref { rank: pivots.len(), reduced: m, pivot_cols: pivots }, t)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, s: &K::Elem, from: usize) {
        for c in from..self.cols {
            let i = r * self.cols + c;
            self.data[i] = self.field.mul(&self.data[i], s);
        }
    }

    /// row[target] -= factor * row[src], starting at column `from`.
    fn axpy_row(&mut self, target: usize, src: usize, factor: &K::Elem, from: usize) {
        for c in from..self.cols {
            let s = &self.data[src * self.cols + c];
            if self.field.is_zero(s) {
                continue;
            }
            let prod = self.field.mul(factor, s);
            let i = target * self.cols + c;
            self.data[i] = self.field.sub(&self.data[i], &prod);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Columns form a basis of the null space, one per free column, in column order.
    pub fn kernel_basis(&self) -> Self {
        let f = &self.field;
        let r = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !r.pivot_cols.contains(c)).collect();
        let mut k = Self::zeros(f, self.cols, free.len());
        for (j, &fc) in free.iter().enumerate() {
            k.set(fc, j, f.one());
            for (i, &pc) in r.pivot_cols.iter().enumerate() {
                k.set(pc, j, f.neg(r.reduced.get(i, fc)));
            }
        }
        k
    }

    /// Some `x` with `self * x = b`, or `None` if inconsistent.
    pub fn solve(&self, b: &[K::Elem]) -> Result<Option<Vec<K::Elem>>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {} for {} rows",
                b.len(),
                self.rows
            )));
        }
        let bm = Self::from_columns(&self.field, self.rows, &[b.to_vec()]);
        Ok(self.solve_matrix(&bm)?.map(|x| x.column(0)))
    }

    /// Some `x` with `self * x = b` for a matrix right-hand side.
    pub fn solve_matrix(&self, b: &Self) -> Result<Option<Self>> {
        if b.rows != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side with {} rows for {} rows",
                b.rows, self.rows
            )));
        }
        let f = &self.field;
        let aug = self.hstack(b)?;
        let r = aug.rref();
        if r.pivot_cols.iter().any(|&c| c >= self.cols) {
            return Ok(None);
        }
        let mut x = Self::zeros(f, self.cols, b.cols);
        for (i, &pc) in r.pivot_cols.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, r.reduced.get(i, self.cols + j).clone());
            }
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let (r, t) = self.rref_with_transform();
        (r.rank == self.rows).then_some(t)
    }

    /// Basis (as columns) of the column space, taken from the pivot columns.
    pub fn column_space(&self) -> Self {
        let r = self.rref();
        self.select_cols(&r.pivot_cols)
    }

    /// Indices of standard basis vectors spanning a complement of the column space.
    pub fn complement_coordinates(&self) -> Vec<usize> {
        let r = self.transpose().rref();
        (0..self.rows).filter(|c| !r.pivot_cols.contains(c)).collect()
    }
}

/// A quotient `ambient / span(sub)` with basis given by standard vectors.
#[derive(Clone, Debug)]
pub struct Quotient<K: Field> {
    pub ambient: usize,
    /// Standard basis vectors whose images form the quotient basis.
    pub basis_coords: Vec<usize>,
    /// Map from ambient coordinates to quotient coordinates.
    pub projection: DenseMatrix<K>,
    /// Basis of the subspace (columns).
    pub sub_basis: DenseMatrix<K>,
}

impl<K: Field> Quotient<K> {
    pub fn new(field: &K, sub: &DenseMatrix<K>) -> Self {
        let ambient = sub.rows();
        let sub_basis = sub.column_space();
        let comp = sub.complement_coordinates();
        let mut full = sub_basis.clone();
        for &c in &comp {
            let mut e = vec![field.zero(); ambient];
            e[c] = field.one();
            full = full.hstack(&DenseMatrix::from_columns(field, ambient, &[e])).expect("rows agree");
        }
        let inv = full.inverse().expect("basis plus complement is invertible");
        let k = sub_basis.cols();
        let projection = inv.block(k, comp.len(), 0, ambient);
        Quotient { ambient, basis_coords: comp, projection, sub_basis }
    }

    pub fn dim(&self) -> usize {
        self.basis_coords.len()
    }

    /// Lift of the quotient basis into ambient coordinates.
    pub fn section(&self, field: &K) -> DenseMatrix<K> {
        let mut s = DenseMatrix::zeros(field, self.ambient, self.dim());
        for (j, &c) in self.basis_coords.iter().enumerate() {
            s.set(c, j, field.one());
        }
        s
    }
}
