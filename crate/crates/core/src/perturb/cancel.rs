use super::contraction::Contraction;
use super::operator::Operator;
use crate::error::{Error, Result};
use crate::exactlin::Field;
use crate::homalg::{FreeComplex, FreeModule, GradedMatrix};

/// Generator indices of one term split as V ⊕ W ⊕ Y.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TermSplit {
    pub v: Vec<usize>,
    pub w: Vec<usize>,
    pub y: Vec<usize>,
}

/// Write `block` into `m` at the given rows and columns.
fn scatter<K: Field>(m: &mut GradedMatrix<K>, rows: &[usize], cols: &[usize], block: &GradedMatrix<K>) -> Result<()> {
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            m.set_entry(r, c, block.entry(i, j).clone())?;
        }
    }
    Ok(())
}

/// Cancellation of the invertible components d_{wv}: V^p → W^{p+1}.
/// `splits[k]` describes position `x.lo() + k`.
pub fn cancel<K: Field>(x: &FreeComplex<K>, splits: &[TermSplit]) -> Result<Contraction<K>> {
    let c = cancel_raw(x, splits)?;
    c.verify()?;
    Ok(c)
}

#[doc(hidden)]
pub fn cancel_unchecked<K: Field>(x: &FreeComplex<K>, splits: &[TermSplit]) -> Contraction<K> {
    cancel_raw(x, splits).unwrap()
}

fn cancel_raw<K: Field>(x: &FreeComplex<K>, splits: &[TermSplit]) -> Result<Contraction<K>> {
    let lo = x.lo();
    let len = x.terms().len();
    if splits.len() != len {
        return Err(Error::DimensionMismatch(format!("{} splits for {} terms", splits.len(), len)));
    }
    for (k, s) in splits.iter().enumerate() {
        let mut all: Vec<usize> = s.v.iter().chain(&s.w).chain(&s.y).copied().collect();
        all.sort();
        if all != (0..x.terms()[k].rank()).collect::<Vec<_>>() {
            return Err(Error::InvalidInput(format!("split at position {} is not a partition", lo + k as i64)));
        }
    }
    let field = x.field();
    let split = |p: i64| -> TermSplit {
        let k = p - lo;
        if k < 0 || k as usize >= len {
            TermSplit::default()
        } else {
            splits[k as usize].clone()
        }
    };
    let term = |p: i64| x.term(p).unwrap_or_else(|_| FreeModule::zero(x.ring()));
    // inverse of d_wv at each p: W^{p+1} → V^p
    let mut inv: Vec<Option<GradedMatrix<K>>> = Vec::with_capacity(len);
    for p in lo..lo + len as i64 {
        let (s, t) = (split(p), split(p + 1));
        if s.v.len() != t.w.len() {
            return Err(Error::InvalidInput(format!("|V^{p}| ≠ |W^{}|", p + 1)));
        }
        if s.v.is_empty() {
            inv.push(None);
            continue;
        }
        let d = x.diff(p)?;
        let dwv = d.submatrix(&t.w, &s.v);
        let inverse = graded_inverse(&dwv)?
            .ok_or_else(|| Error::InvalidInput(format!("d_wv at position {p} has a singular scalar part")))?;
        inv.push(Some(inverse));
    }
    let inv_at = |p: i64| -> Option<&GradedMatrix<K>> {
        let k = p - lo;
        if k < 0 || k as usize >= len {
            None
        } else {
            inv[k as usize].as_ref()
        }
    };

    let small_terms: Vec<FreeModule<K>> = (0..len).map(|k| x.terms()[k].select(&splits[k].y)).collect();
    let mut small_diffs = Vec::new();
    for p in lo..lo + len as i64 - 1 {
        let (s, t) = (split(p), split(p + 1));
        let d = x.diff(p)?;
        let mut dy = d.submatrix(&t.y, &s.y);
        if let Some(iv) = inv_at(p) {
            let dyv = d.submatrix(&t.y, &s.v);
            let dwy = d.submatrix(&t.w, &s.y);
            dy = dy.sub(&dwy.then(iv)?.then(&dyv)?)?;
        }
        small_diffs.push(dy);
    }
    let small = FreeComplex::new(x.ring(), lo, small_terms.clone(), small_diffs, x.is_bounded())?;

    let mut f = Vec::new();
    let mut g = Vec::new();
    let mut h = Vec::new();
    for (k, p) in (lo..lo + len as i64).enumerate() {
        let s = split(p);
        let xp = term(p);
        let yp = &small_terms[k];
        // f: X^p → Y^p
        let mut fm = GradedMatrix::zero(&xp, yp);
        let yidx: Vec<usize> = (0..s.y.len()).collect();
        scatter(&mut fm, &yidx, &s.y, &GradedMatrix::identity(yp))?;
        if let Some(iv) = inv_at(p - 1) {
            let prev = split(p - 1);
            let dyv = x.diff(p - 1)?.submatrix(&s.y, &prev.v);
            scatter(&mut fm, &yidx, &s.w, &iv.then(&dyv)?.neg())?;
        }
        f.push(fm);
        // g: Y^p → X^p
        let mut gm = GradedMatrix::zero(yp, &xp);
        scatter(&mut gm, &s.y, &yidx, &GradedMatrix::identity(yp))?;
        if let Some(iv) = inv_at(p) {
            let next = split(p + 1);
            let dwy = x.diff(p)?.submatrix(&next.w, &s.y);
            scatter(&mut gm, &s.v, &yidx, &dwy.then(iv)?.neg())?;
        }
        g.push(gm);
        // h: X^p → X^{p-1}
        let xq = term(p - 1);
        let mut hm = GradedMatrix::zero(&xp, &xq);
        if let Some(iv) = inv_at(p - 1) {
            let prev = split(p - 1);
            scatter(&mut hm, &prev.v, &s.w, iv)?;
        }
        h.push(hm);
    }
    let c = Contraction {
        big: x.clone(),
        small,
        f: Operator { degree: 0, lo, maps: f },
        g: Operator { degree: 0, lo, maps: g },
        h: Operator { degree: -1, lo, maps: h },
    };
    let _ = field;
    Ok(c)
}

/// Inverse of a degree-0 map of free modules with invertible scalar part A₀:
/// A⁻¹ = Σ_k (-A₀⁻¹N)^k A₀⁻¹ with N = A - A₀, a finite sum because N raises degrees.
fn graded_inverse<K: Field>(a: &GradedMatrix<K>) -> Result<Option<GradedMatrix<K>>> {
    let sc = a.scalar_part();
    let Some(scinv) = sc.inverse() else { return Ok(None) };
    let a0inv = GradedMatrix::from_scalar(a.target(), a.source(), &scinv)?;
    let a0 = GradedMatrix::from_scalar(a.source(), a.target(), &sc)?;
    let t = a.sub(&a0)?.then(&a0inv)?.neg();
    let mut inv = a0inv.clone();
    let mut cur = a0inv;
    for _ in 0..=a.cols() {
        cur = cur.then(&t)?;
        if cur.is_zero() {
            break;
        }
        inv = inv.add(&cur)?;
    }
    if !a.then(&inv)?.sub(&GradedMatrix::identity(a.source()))?.is_zero() {
        return Err(Error::Invariant("graded inverse does not invert".into()));
    }
    Ok(Some(inv))
}

/// Splits cancelling a maximal invertible scalar block of every differential.
pub fn unit_splits<K: Field>(x: &FreeComplex<K>) -> Result<Vec<TermSplit>> {
    let lo = x.lo();
    let len = x.terms().len();
    let mut w_of: Vec<Vec<usize>> = vec![Vec::new(); len];
    let mut v_of: Vec<Vec<usize>> = vec![Vec::new(); len];
    for k in 0..len.saturating_sub(1) {
        let p = lo + k as i64;
        let d = x.diff(p)?;
        let eligible: Vec<usize> = (0..x.terms()[k].rank()).filter(|c| !w_of[k].contains(c)).collect();
        if eligible.is_empty() {
            continue;
        }
        let sc = d.scalar_part().select_cols(&eligible);
        let r = sc.rref();
        if r.rank == 0 {
            continue;
        }
        let vcols: Vec<usize> = r.pivot_cols.iter().map(|&c| eligible[c]).collect();
        let rows = d.scalar_part().select_cols(&vcols).transpose().rref().pivot_cols;
        v_of[k] = vcols;
        w_of[k + 1] = rows;
    }
    Ok((0..len)
        .map(|k| {
            let y = (0..x.terms()[k].rank()).filter(|i| !v_of[k].contains(i) && !w_of[k].contains(i)).collect();
            TermSplit { v: v_of[k].clone(), w: w_of[k].clone(), y }
        })
        .collect())
}

/// Contraction onto a minimal complex by cancelling all unit entries.
pub fn minimize<K: Field>(x: &FreeComplex<K>) -> Result<Contraction<K>> {
    let mut c = Contraction::identity(x);
    loop {
        let splits = unit_splits(&c.small)?;
        if splits.iter().all(|s| s.v.is_empty()) {
            return Ok(c);
        }
        let step = cancel(&c.small, &splits)?;
        c = c.then(&step)?;
    }
}
