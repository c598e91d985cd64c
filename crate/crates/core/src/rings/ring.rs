use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{DenseMatrix, Field};

/// Which graded algebra over the field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RingKind {
    /// S = k[X_0..X_n]
    Symmetric,
    /// Λ = exterior algebra on e_0..e_n
    Exterior,
    /// The field itself, for complexes of vector spaces.
    Ground,
}

/// Exponent vector. For the exterior algebra the exponents are 0/1.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = Self::one(nvars);
        m.0[i] = 1;
        m
    }

    pub fn from_indices(nvars: usize, idx: &[usize]) -> Self {
        let mut m = Self::one(nvars);
        for &i in idx {
            m.0[i] += 1;
        }
        m
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn exps(&self) -> &[u16] {
        &self.0
    }

    /// Indices with multiplicity, ascending.
    pub fn indices(&self) -> Vec<usize> {
        let mut v = Vec::new();
        for (i, &e) in self.0.iter().enumerate() {
            for _ in 0..e {
                v.push(i);
            }
        }
        v
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Canonical order: descending lexicographic on exponent vectors, so that
/// X0^2 < X0X1 < ... and e0e1 < e0e2 < e1e2 in list position.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.cmp(&self.0)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A ring element: terms sorted in canonical monomial order, no zero coefficients.
#[derive(Clone, PartialEq)]
pub struct RingElem<K: Field> {
    terms: Vec<(Monomial, K::Elem)>,
}

impl<K: Field> fmt::Debug for RingElem<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.terms)
    }
}

impl<K: Field> RingElem<K> {
    pub fn zero() -> Self {
        RingElem { terms: Vec::new() }
    }

    pub fn terms(&self) -> &[(Monomial, K::Elem)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree of a nonzero homogeneous element.
    pub fn degree(&self) -> Option<usize> {
        self.terms.first().map(|(m, _)| m.degree())
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.terms.first() {
            None => true,
            Some((m0, _)) => self.terms.iter().all(|(m, _)| m.degree() == m0.degree()),
        }
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&K::Elem> {
        self.terms.binary_search_by(|(x, _)| x.cmp(m)).ok().map(|i| &self.terms[i].1)
    }

    /// Coefficient of the unit monomial.
    pub fn constant(&self) -> Option<&K::Elem> {
        self.terms.iter().find(|(m, _)| m.degree() == 0).map(|(_, c)| c)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ring<K: Field> {
    field: K,
    n: usize,
    kind: RingKind,
}

impl<K: Field> Ring<K> {
    pub fn new(field: K, n: usize, kind: RingKind) -> Self {
        Ring { field, n, kind }
    }

    pub fn symmetric(field: K, n: usize) -> Self {
        Self::new(field, n, RingKind::Symmetric)
    }

    pub fn exterior(field: K, n: usize) -> Self {
        Self::new(field, n, RingKind::Exterior)
    }

    pub fn ground(field: K) -> Self {
        Self::new(field, 0, RingKind::Ground)
    }

    pub fn field(&self) -> &K {
        &self.field
    }

    /// Projective dimension parameter: the ring has n+1 variables.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> RingKind {
        self.kind
    }

    pub fn nvars(&self) -> usize {
        match self.kind {
            RingKind::Ground => 0,
            _ => self.n + 1,
        }
    }

    /// The Koszul-dual partner over the same field and n.
    pub fn dual_ring(&self) -> Self {
        let kind = match self.kind {
            RingKind::Symmetric => RingKind::Exterior,
            RingKind::Exterior => RingKind::Symmetric,
            RingKind::Ground => RingKind::Ground,
        };
        Ring::new(self.field.clone(), self.n, kind)
    }

    pub fn basis(&self, d: i64) -> Vec<Monomial> {
        if d < 0 {
            return Vec::new();
        }
        let d = d as usize;
        let nv = self.nvars();
        match self.kind {
            RingKind::Ground => {
                if d == 0 {
                    vec![Monomial(Vec::new())]
                } else {
                    Vec::new()
                }
            }
            RingKind::Symmetric => {
                let mut out = Vec::new();
                let mut cur = vec![0u16; nv];
                sym_rec(&mut out, &mut cur, 0, d);
                out
            }
            RingKind::Exterior => {
                if d > nv {
                    return Vec::new();
                }
                let mut out = Vec::new();
                let mut cur = vec![0u16; nv];
                ext_rec(&mut out, &mut cur, 0, d);
                out
            }
        }
    }

    pub fn basis_index(&self, d: i64) -> HashMap<Monomial, usize> {
        self.basis(d).into_iter().enumerate().map(|(i, m)| (m, i)).collect()
    }

    pub fn dim(&self, d: i64) -> usize {
        if d < 0 {
            return 0;
        }
        let d = d as usize;
        let nv = self.nvars();
        match self.kind {
            RingKind::Ground => (d == 0) as usize,
            RingKind::Symmetric => binomial(d + nv - 1, nv - 1),
            RingKind::Exterior => binomial(nv, d),
        }
    }

    /// Largest degree with a nonzero piece, if finite.
    pub fn top_degree(&self) -> Option<usize> {
        match self.kind {
            RingKind::Symmetric => None,
            RingKind::Exterior => Some(self.nvars()),
            RingKind::Ground => Some(0),
        }
    }

    /// Product of monomials with its sign; `None` when it vanishes.
    pub fn mono_mul(&self, a: &Monomial, b: &Monomial) -> Option<(Monomial, bool)> {
        match self.kind {
            RingKind::Symmetric | RingKind::Ground => {
                Some((Monomial(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect()), false))
            }
            RingKind::Exterior => {
                if a.0.iter().zip(&b.0).any(|(x, y)| *x == 1 && *y == 1) {
                    return None;
                }
                // a sits to the left of b; each pair i in a, j in b with i > j costs a swap
                let mut inv = 0usize;
                let mut bcount = 0usize;
                for i in 0..a.0.len() {
                    if a.0[i] == 1 {
                        inv += bcount;
                    }
                    if b.0[i] == 1 {
                        bcount += 1;
                    }
                }
                Some((Monomial(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect()), inv % 2 == 1))
            }
        }
    }

    pub fn from_terms(&self, terms: Vec<(Monomial, K::Elem)>) -> Result<RingElem<K>> {
        for (m, _) in &terms {
            if m.0.len() != self.nvars() {
                return Err(Error::InvalidInput(format!(
                    "exponent vector of length {} for {} variables",
                    m.0.len(),
                    self.nvars()
                )));
            }
            if self.kind == RingKind::Exterior && m.0.iter().any(|&e| e > 1) {
                return Err(Error::InvalidInput("exterior exponent above 1".into()));
            }
        }
        Ok(self.normalize(terms))
    }

    fn normalize(&self, mut terms: Vec<(Monomial, K::Elem)>) -> RingElem<K> {
        let f = &self.field;
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Monomial, K::Elem)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = f.add(lc, &c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !f.is_zero(c));
        RingElem { terms: out }
    }

    pub fn constant(&self, c: K::Elem) -> RingElem<K> {
        self.normalize(vec![(Monomial::one(self.nvars()), c)])
    }

    pub fn one(&self) -> RingElem<K> {
        self.constant(self.field.one())
    }

    pub fn var(&self, i: usize) -> RingElem<K> {
        self.normalize(vec![(Monomial::var(self.nvars(), i), self.field.one())])
    }

    pub fn monomial(&self, m: Monomial, c: K::Elem) -> RingElem<K> {
        self.normalize(vec![(m, c)])
    }

    pub fn add(&self, a: &RingElem<K>, b: &RingElem<K>) -> RingElem<K> {
        let mut t = a.terms.clone();
        t.extend(b.terms.iter().cloned());
        self.normalize(t)
    }

    pub fn sub(&self, a: &RingElem<K>, b: &RingElem<K>) -> RingElem<K> {
        self.add(a, &self.neg(b))
    }

    pub fn neg(&self, a: &RingElem<K>) -> RingElem<K> {
        RingElem { terms: a.terms.iter().map(|(m, c)| (m.clone(), self.field.neg(c))).collect() }
    }

    pub fn scale(&self, a: &RingElem<K>, s: &K::Elem) -> RingElem<K> {
        if self.field.is_zero(s) {
            return RingElem::zero();
        }
        RingElem { terms: a.terms.iter().map(|(m, c)| (m.clone(), self.field.mul(c, s))).collect() }
    }

    pub fn mul(&self, a: &RingElem<K>, b: &RingElem<K>) -> RingElem<K> {
        if a.is_zero() || b.is_zero() {
            return RingElem::zero();
        }
        let f = &self.field;
        let mut t = Vec::with_capacity(a.terms.len() * b.terms.len());
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                if let Some((m, neg)) = self.mono_mul(ma, mb) {
                    let c = f.mul(ca, cb);
                    t.push((m, if neg { f.neg(&c) } else { c }));
                }
            }
        }
        self.normalize(t)
    }

    /// Multiply every term of degree `e` by `(-1)^(s(e))`.
    pub fn map_sign_by_degree(&self, a: &RingElem<K>, s: impl Fn(usize) -> bool) -> RingElem<K> {
        RingElem {
            terms: a
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), if s(m.degree()) { self.field.neg(c) } else { c.clone() }))
                .collect(),
        }
    }

    /// Matrix of left multiplication by homogeneous `x` from degree `d` to `d + deg x`.
    pub fn mult_map(&self, x: &RingElem<K>, d: i64) -> Result<DenseMatrix<K>> {
        if !x.is_homogeneous() {
            return Err(Error::InvalidInput("multiplier is not homogeneous".into()));
        }
        let e = x.degree().unwrap_or(0) as i64;
        let src = self.basis(d);
        let tgt = self.basis_index(d + e);
        let f = &self.field;
        let mut m = DenseMatrix::zeros(f, tgt.len(), src.len());
        for (j, b) in src.iter().enumerate() {
            for (mx, c) in &x.terms {
                if let Some((p, neg)) = self.mono_mul(mx, b) {
                    let i = tgt[&p];
                    let v = if neg { f.neg(c) } else { c.clone() };
                    m.set(i, j, f.add(m.get(i, j), &v));
                }
            }
        }
        Ok(m)
    }

    /// Sign-free rendering such as `3*X0^2*X1 - X2` or `e0*e2`.
    pub fn format(&self, a: &RingElem<K>) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let sym = match self.kind {
            RingKind::Exterior => "e",
            _ => "X",
        };
        let mut s = String::new();
        for (k, (m, c)) in a.terms.iter().enumerate() {
            let cs = self.field.format(c);
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(r) => (true, r.to_string()),
                None => (false, cs),
            };
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mut factors = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("{sym}{i}")),
                    _ => factors.push(format!("{sym}{i}^{e}")),
                }
            }
            if factors.is_empty() {
                s.push_str(&mag);
            } else {
                if mag != "1" {
                    s.push_str(&mag);
                    s.push('*');
                }
                s.push_str(&factors.join("*"));
            }
        }
        s
    }
}

fn sym_rec(out: &mut Vec<Monomial>, cur: &mut Vec<u16>, i: usize, left: usize) {
    if i + 1 == cur.len() {
        cur[i] = left as u16;
        out.push(Monomial(cur.clone()));
        cur[i] = 0;
        return;
    }
    for e in (0..=left).rev() {
        cur[i] = e as u16;
        sym_rec(out, cur, i + 1, left - e);
    }
    cur[i] = 0;
}

fn ext_rec(out: &mut Vec<Monomial>, cur: &mut Vec<u16>, i: usize, left: usize) {
    if left == 0 {
        out.push(Monomial(cur.clone()));
        return;
    }
    if i == cur.len() || cur.len() - i < left {
        return;
    }
    cur[i] = 1;
    ext_rec(out, cur, i + 1, left - 1);
    cur[i] = 0;
    ext_rec(out, cur, i + 1, left);
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r as usize
}
