use crate::error::{Error, Result};
use crate::exactlin::Field;
use crate::homalg::{FreeComplex, FreeModule, GradedMatrix};

/// A family of maps `C^p → D^{p+degree}` for p in `lo..=hi` of the source window.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator<K: Field> {
    pub degree: i64,
    pub lo: i64,
    pub maps: Vec<GradedMatrix<K>>,
}

fn term_or_zero<K: Field>(c: &FreeComplex<K>, p: i64) -> FreeModule<K> {
    c.term(p).unwrap_or_else(|_| FreeModule::zero(c.ring()))
}

impl<K: Field> Operator<K> {
    pub fn zero(src: &FreeComplex<K>, tgt: &FreeComplex<K>, degree: i64) -> Self {
        let maps = src
            .positions()
            .map(|p| GradedMatrix::zero(&term_or_zero(src, p), &term_or_zero(tgt, p + degree)))
            .collect();
        Operator { degree, lo: src.lo(), maps }
    }

    pub fn identity(c: &FreeComplex<K>) -> Self {
        Operator { degree: 0, lo: c.lo(), maps: c.terms().iter().map(GradedMatrix::identity).collect() }
    }

    /// The differential as a degree-1 operator.
    pub fn differential(c: &FreeComplex<K>) -> Self {
        let maps = c
            .positions()
            .map(|p| c.diff(p).unwrap_or_else(|_| GradedMatrix::zero(&term_or_zero(c, p), &FreeModule::zero(c.ring()))))
            .collect();
        Operator { degree: 1, lo: c.lo(), maps }
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.maps.len() as i64 - 1
    }

    /// Component at p, if stored.
    pub fn at(&self, p: i64) -> Option<&GradedMatrix<K>> {
        let k = p - self.lo;
        (k >= 0 && (k as usize) < self.maps.len()).then(|| &self.maps[k as usize])
    }

    pub fn set(&mut self, p: i64, m: GradedMatrix<K>) {
        let k = (p - self.lo) as usize;
        self.maps[k] = m;
    }

    /// `after ∘ self`; components whose intermediate position is not stored are zero.
    pub fn then(&self, after: &Operator<K>) -> Result<Operator<K>> {
        let mut maps = Vec::with_capacity(self.maps.len());
        for (k, m) in self.maps.iter().enumerate() {
            let p = self.lo + k as i64;
            let q = p + self.degree;
            let out = match after.at(q) {
                Some(a) if a.source().gens() == m.target().gens() => m.then(a)?,
                Some(a) if m.target().is_zero() || a.source().is_zero() => {
                    GradedMatrix::zero(m.source(), a.target())
                }
                Some(_) => return Err(Error::DimensionMismatch(format!("operator composition at position {p}"))),
                None => {
                    // target of `after` unknown; only a zero map makes sense
                    let tgt = FreeModule::zero(m.source().ring());
                    if !m.target().is_zero() && !m.is_zero() {
                        return Err(Error::OutsideWindow(format!("composition leaves the window at position {q}")));
                    }
                    GradedMatrix::zero(m.source(), &tgt)
                }
            };
            maps.push(out);
        }
        Ok(Operator { degree: self.degree + after.degree, lo: self.lo, maps })
    }

    fn zip(&self, other: &Self, add: bool) -> Result<Self> {
        if self.degree != other.degree || self.lo != other.lo || self.maps.len() != other.maps.len() {
            return Err(Error::DimensionMismatch("sum of operators with different shapes".into()));
        }
        let maps = self
            .maps
            .iter()
            .zip(&other.maps)
            .map(|(a, b)| {
                // a component that left the window is a zero map with an empty target
                if a.target().is_zero() && b.target().is_zero() {
                    return Ok(a.clone());
                }
                if a.target().is_zero() && a.source() == b.source() {
                    return Ok(if add { b.clone() } else { b.neg() });
                }
                if b.target().is_zero() && a.source() == b.source() {
                    return Ok(a.clone());
                }
                if add {
                    a.add(b)
                } else {
                    a.sub(b)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Operator { degree: self.degree, lo: self.lo, maps })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, true)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, false)
    }

    pub fn neg(&self) -> Self {
        Operator { degree: self.degree, lo: self.lo, maps: self.maps.iter().map(|m| m.neg()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.maps.iter().all(|m| m.is_zero())
    }

    /// Positions (of the source) where the component is nonzero.
    pub fn support(&self) -> Vec<i64> {
        self.maps.iter().enumerate().filter(|(_, m)| !m.is_zero()).map(|(k, _)| self.lo + k as i64).collect()
    }

    /// Block-diagonal sum of two operators with the same window and degree.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.degree != other.degree || self.lo != other.lo || self.maps.len() != other.maps.len() {
            return Err(Error::DimensionMismatch("direct sum of operators with different shapes".into()));
        }
        let maps = self
            .maps
            .iter()
            .zip(&other.maps)
            .map(|(a, b)| {
                GradedMatrix::from_blocks(
                    &[a.source().clone(), b.source().clone()],
                    &[a.target().clone(), b.target().clone()],
                    &[vec![Some(a.clone()), None], vec![None, Some(b.clone())]],
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Operator { degree: self.degree, lo: self.lo, maps })
    }
}
