use super::operator::Operator;
use crate::error::{ensure, Error, Result};
use crate::exactlin::Field;
use crate::homalg::FreeComplex;

/// Contraction of `big` onto `small`: f: X→Y, g: Y→X, h: X→X of degree -1 with
/// fg = id, id - gf = dh + hd, fh = 0, hg = 0, h² = 0.
#[derive(Clone, Debug)]
pub struct Contraction<K: Field> {
    pub big: FreeComplex<K>,
    pub small: FreeComplex<K>,
    pub f: Operator<K>,
    pub g: Operator<K>,
    pub h: Operator<K>,
}

/// Which of the five identities failed, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Identity {
    FgIsId,
    Homotopy,
    FhZero,
    HgZero,
    HhZero,
    FChainMap,
    GChainMap,
}

impl std::fmt::Display for Identity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Identity::FgIsId => "fg = id",
            Identity::Homotopy => "id - gf = dh + hd",
            Identity::FhZero => "fh = 0",
            Identity::HgZero => "hg = 0",
            Identity::HhZero => "h² = 0",
            Identity::FChainMap => "f is a chain map",
            Identity::GChainMap => "g is a chain map",
        };
        f.write_str(s)
    }
}

/// Positions where an identity is checked: every position for bounded complexes,
/// interior ones otherwise.
fn check_range<K: Field>(c: &FreeComplex<K>) -> std::ops::RangeInclusive<i64> {
    if c.is_bounded() {
        c.lo()..=c.hi()
    } else {
        c.lo() + 1..=c.hi() - 1
    }
}

fn comp_eq<K: Field>(a: &Operator<K>, b: &Operator<K>, range: &std::ops::RangeInclusive<i64>) -> bool {
    range.clone().all(|p| match (a.at(p), b.at(p)) {
        (Some(x), Some(y)) => x.is_zero() && y.is_zero() || x == y,
        (Some(x), None) | (None, Some(x)) => x.is_zero(),
        (None, None) => true,
    })
}

fn all_zero<K: Field>(a: &Operator<K>, range: &std::ops::RangeInclusive<i64>) -> bool {
    range.clone().all(|p| a.at(p).is_none_or(|m| m.is_zero()))
}

impl<K: Field> Contraction<K> {
    /// Identity contraction of a complex onto itself.
    pub fn identity(c: &FreeComplex<K>) -> Self {
        Contraction {
            big: c.clone(),
            small: c.clone(),
            f: Operator::identity(c),
            g: Operator::identity(c),
            h: Operator::zero(c, c, -1),
        }
    }

    /// First failing identity among (i) and (ii) plus the chain-map conditions.
    pub fn check_homotopy_data(&self) -> std::result::Result<(), Identity> {
        let (dx, dy) = (Operator::differential(&self.big), Operator::differential(&self.small));
        let rx = check_range(&self.big);
        let ry = check_range(&self.small);
        let e = |_| Identity::Homotopy;
        let fd = dx.then(&self.f).map_err(|_| Identity::FChainMap)?;
        let df = self.f.then(&dy).map_err(|_| Identity::FChainMap)?;
        if !comp_eq(&fd, &df, &rx) {
            return Err(Identity::FChainMap);
        }
        let gd = dy.then(&self.g).map_err(|_| Identity::GChainMap)?;
        let dg = self.g.then(&dx).map_err(|_| Identity::GChainMap)?;
        if !comp_eq(&gd, &dg, &ry) {
            return Err(Identity::GChainMap);
        }
        let fg = self.g.then(&self.f).map_err(|_| Identity::FgIsId)?;
        if !comp_eq(&fg, &Operator::identity(&self.small), &ry) {
            return Err(Identity::FgIsId);
        }
        let gf = self.f.then(&self.g).map_err(e)?;
        let lhs = Operator::identity(&self.big).sub(&gf).map_err(e)?;
        let rhs = self.h.then(&dx).map_err(e)?.add(&dx.then(&self.h).map_err(e)?).map_err(e)?;
        if !comp_eq(&lhs, &rhs, &rx) {
            return Err(Identity::Homotopy);
        }
        Ok(())
    }

    /// All five identities.
    pub fn check_identities(&self) -> std::result::Result<(), Identity> {
        self.check_homotopy_data()?;
        let rx = check_range(&self.big);
        let ry = check_range(&self.small);
        let fh = self.h.then(&self.f).map_err(|_| Identity::FhZero)?;
        if !all_zero(&fh, &rx) {
            return Err(Identity::FhZero);
        }
        let hg = self.g.then(&self.h).map_err(|_| Identity::HgZero)?;
        if !all_zero(&hg, &ry) {
            return Err(Identity::HgZero);
        }
        let hh = self.h.then(&self.h).map_err(|_| Identity::HhZero)?;
        if !all_zero(&hh, &rx) {
            return Err(Identity::HhZero);
        }
        Ok(())
    }

    pub fn verify(&self) -> Result<()> {
        self.check_identities().map_err(|i| Error::Invariant(format!("contraction identity fails: {i}")))
    }

    /// Direct sum of two contractions over complexes with the same window.
    pub fn direct_sum(&self, other: &Contraction<K>) -> Result<Contraction<K>> {
        ensure(self.big.lo() == other.big.lo() && self.big.hi() == other.big.hi(), || {
            "direct sum of contractions needs equal windows".into()
        })?;
        Ok(Contraction {
            big: self.big.direct_sum(&other.big)?,
            small: self.small.direct_sum(&other.small)?,
            f: self.f.direct_sum(&other.f)?,
            g: self.g.direct_sum(&other.g)?,
            h: self.h.direct_sum(&other.h)?,
        })
    }

    /// Compose with a contraction of `self.small` onto something smaller.
    pub fn then(&self, next: &Contraction<K>) -> Result<Contraction<K>> {
        ensure(next.big == self.small, || "contractions do not compose".into())?;
        let f = self.f.then(&next.f)?;
        let g = next.g.then(&self.g)?;
        // h = h1 + g1 h2 f1
        let h = self.h.add(&self.f.then(&next.h)?.then(&self.g)?)?;
        Ok(Contraction { big: self.big.clone(), small: next.small.clone(), f, g, h })
    }
}

/// Lambe–Stasheff normalization: h' = φhφ with φ = id - gf, then h'' = h' d h'.
pub fn normalize<K: Field>(
    big: &FreeComplex<K>,
    small: &FreeComplex<K>,
    f: &Operator<K>,
    g: &Operator<K>,
    h: &Operator<K>,
) -> Result<Contraction<K>> {
    let raw = Contraction { big: big.clone(), small: small.clone(), f: f.clone(), g: g.clone(), h: h.clone() };
    raw.check_homotopy_data()
        .map_err(|i| Error::InvalidInput(format!("raw contraction data violates {i}")))?;
    let phi = Operator::identity(big).sub(&f.then(g)?)?;
    let h1 = phi.then(h)?.then(&phi)?;
    let dx = Operator::differential(big);
    let h2 = h1.then(&dx)?.then(&h1)?;
    let c = Contraction { big: big.clone(), small: small.clone(), f: f.clone(), g: g.clone(), h: h2 };
    c.verify()?;
    Ok(c)
}
