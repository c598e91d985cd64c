use super::contraction::Contraction;
use super::operator::Operator;
use crate::error::{ensure, Error, Result};
use crate::exactlin::Field;
use crate::homalg::{FreeComplex, GradedMatrix};

/// Σ_{i≥0} (-1)^i a^i for a locally nilpotent degree-0 operator, with the index used.
fn alternating_series<K: Field>(a: &Operator<K>, id: &Operator<K>, bound: usize) -> Result<(Operator<K>, usize)> {
    let mut sum = id.clone();
    let mut power = id.clone();
    for i in 1..=bound + 1 {
        power = power.then(a)?;
        if power.is_zero() {
            return Ok((sum, i));
        }
        if i > bound {
            return Err(Error::NotNilpotent { power: i });
        }
        sum = if i % 2 == 1 { sum.sub(&power)? } else { sum.add(&power)? };
    }
    Err(Error::NotNilpotent { power: bound + 1 })
}

/// (id + a)^{-1}: the terminating alternating series when a is locally nilpotent, otherwise a
/// direct inverse when every component of id + a is a constant invertible matrix.
fn inverse_of_one_plus<K: Field>(a: &Operator<K>, id: &Operator<K>, bound: usize) -> Result<Operator<K>> {
    match alternating_series(a, id, bound) {
        Ok((s, _)) => Ok(s),
        Err(e @ Error::NotNilpotent { .. }) => {
            let sum = id.add(a)?;
            let mut maps = Vec::with_capacity(sum.maps.len());
            for m in &sum.maps {
                let inv = (m.without_units().is_zero())
                    .then(|| m.scalar_part().inverse())
                    .flatten()
                    .ok_or_else(|| e.clone())?;
                maps.push(GradedMatrix::from_scalar(m.target(), m.source(), &inv)?);
            }
            Ok(Operator { degree: 0, lo: sum.lo, maps })
        }
        Err(e) => Err(e),
    }
}

/// Rebuild a complex on the same terms with a new differential operator.
fn with_differential<K: Field>(c: &FreeComplex<K>, d: &Operator<K>) -> Result<FreeComplex<K>> {
    let diffs = c.positions().take(c.terms().len().saturating_sub(1)).map(|p| d.at(p).unwrap().clone()).collect();
    FreeComplex::new(c.ring(), c.lo(), c.terms().to_vec(), diffs, c.is_bounded())
}

/// Basic perturbation lemma with the explicit truncating series.
pub fn bpl<K: Field>(c: &Contraction<K>, pert: &Operator<K>, nilpotence_bound: usize) -> Result<Contraction<K>> {
    ensure(pert.degree == 1, || "perturbation must have degree 1".into())?;
    let dx = Operator::differential(&c.big);
    let dhat = dx.add(pert)?;
    let big = with_differential(&c.big, &dhat)?;
    let idx = Operator::identity(&c.big);
    let hd = pert.then(&c.h)?; // h ∘ d'
    let sigma = inverse_of_one_plus(&hd, &idx, nilpotence_bound)?; // (1 + h d')^{-1}
    let dh = c.h.then(pert)?; // d' ∘ h
    let tau = inverse_of_one_plus(&dh, &idx, nilpotence_bound)?; // (1 + d' h)^{-1}
    let dy = Operator::differential(&c.small);
    // d̂_Y = d_Y + f d' σ g
    let corr = c.g.then(&sigma)?.then(pert)?.then(&c.f)?;
    let dyhat = dy.add(&corr)?;
    let small = with_differential(&c.small, &dyhat)?;
    let f = tau.then(&c.f)?;
    let g = c.g.then(&sigma)?;
    let h = c.h.then(&sigma)?;
    let out = Contraction { big, small, f, g, h };
    out.verify()?;
    Ok(out)
}
