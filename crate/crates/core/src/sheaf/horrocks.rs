use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::exactlin::Field;
use crate::homalg::{
    complex_homology, kernel_generators, resolve, ExtModules, FreeComplex, FreeModule, GradedMatrix, HilbertData,
    ModulePresentation,
};
use crate::rings::RingKind;

/// Outcome of the splitting criterion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitVerdict {
    /// M̃ ≅ ⊕ O(a_j), twists ascending.
    Splits(Vec<i64>),
    /// h^i(M̃(d)) = h ≠ 0 with 0 < i < n.
    DoesNotSplit { i: usize, d: i64, h: usize },
}

impl SplitVerdict {
    pub fn to_text(&self) -> String {
        match self {
            SplitVerdict::Splits(a) if a.is_empty() => "splits: 0".into(),
            SplitVerdict::Splits(a) => {
                let parts: Vec<String> = a.iter().map(|x| format!("O({x})")).collect();
                format!("splits: {}", parts.join(" ⊕ "))
            }
            SplitVerdict::DoesNotSplit { i, d, h } => format!("does not split: h^{i}(F({d})) = {h}"),
        }
    }
}

/// Horrocks' criterion: M̃ splits iff Ext^{n-i}(M, ω_S) = 0 for 0 < i < n. The twists are
/// read from Ext^0(M, ω_S) = ⊕ S(-a_j-n-1), the dual of H⁰_* M̃ up to ω_S.
pub fn horrocks_split_check<K: Field>(m: &ModulePresentation<K>) -> Result<SplitVerdict> {
    let n = m.ring().n();
    if n < 2 {
        return Err(Error::InvalidInput("the splitting criterion needs n ≥ 2".into()));
    }
    let ext = ExtModules::new(m)?;
    for i in 1..n {
        let e = ext.presentation((n - i) as i64)?.minimal()?;
        if let Some(g) = e.gens().min_gen() {
            let h = ext.dim((n - i) as i64, g)?;
            ensure(h > 0, || "minimal generator in a zero degree".into())?;
            return Ok(SplitVerdict::DoesNotSplit { i, d: -g, h });
        }
    }
    let e0 = ext.presentation(0)?.minimal()?;
    ensure(e0.relations().source().is_zero(), || "Ext^0(M, ω_S) is not free".into())?;
    let mut twists: Vec<i64> = e0.gens().gens().iter().map(|g| g - n as i64 - 1).collect();
    twists.sort();
    Ok(SplitVerdict::Splits(twists))
}

/// Verdicts on the three equivalent Horrocks conditions with the Krull dimensions behind them.
#[derive(Clone, Debug)]
pub struct HorrocksReport<K: Field> {
    pub complex: FreeComplex<K>,
    /// conditions (1), (2), (3)
    pub conditions: [bool; 3],
    /// position → Krull dimension of H^p(K), -1 for zero
    pub krull: BTreeMap<i64, i64>,
    /// position → Krull dimension of H^p(K^∨)
    pub krull_dual: BTreeMap<i64, i64>,
}

impl<K: Field> HorrocksReport<K> {
    pub fn is_horrocks(&self) -> bool {
        self.conditions[0]
    }
}

fn krull_dims<K: Field>(c: &FreeComplex<K>) -> Result<BTreeMap<i64, i64>> {
    let mut out = BTreeMap::new();
    for p in c.positions() {
        let h = complex_homology(c, p)?;
        out.insert(p, HilbertData::of(&h)?.krull_dim);
    }
    Ok(out)
}

/// Evaluates the three Horrocks conditions on a bounded complex of free S-modules.
/// Disagreement between them is reported as an error.
pub fn is_horrocks_complex<K: Field>(k: &FreeComplex<K>) -> Result<HorrocksReport<K>> {
    ensure(k.ring().kind() == RingKind::Symmetric && k.is_bounded(), || {
        "Horrocks conditions need a bounded complex over S".into()
    })?;
    let n = k.ring().n() as i64;
    let krull = krull_dims(k)?;
    let krull_dual = krull_dims(&k.dual()?)?;
    let vanish = |m: &BTreeMap<i64, i64>, upto: i64| m.iter().all(|(p, d)| *p > upto || *d < 0);
    let c1 = vanish(&krull, -2) && vanish(&krull_dual, 1);
    let c2 = vanish(&krull_dual, 1) && krull_dual.iter().all(|(p, d)| *p <= 1 || *d <= n + 2 - p);
    let c3 = vanish(&krull, -2) && krull.iter().all(|(p, d)| *p < -1 || *d <= n - 1 - p);
    ensure(c1 == c2 && c2 == c3, || format!("Horrocks conditions disagree: ({c1}, {c2}, {c3})"))?;
    Ok(HorrocksReport { complex: k.clone(), conditions: [c1, c2, c3], krull, krull_dual })
}

/// Resolution of the kernel of `phi` by iterated minimal kernel generators,
/// returned as maps G_0 → target, G_1 → G_0, ...
fn kernel_resolution<K: Field>(phi: &GradedMatrix<K>) -> Result<Vec<GradedMatrix<K>>> {
    let cap = phi.ring().n() + 3;
    let mut maps = vec![kernel_generators(phi)?];
    while !maps.last().unwrap().source().is_zero() {
        ensure(maps.len() <= cap, || "kernel resolution failed to terminate".into())?;
        let next = kernel_generators(maps.last().unwrap())?;
        maps.push(next);
    }
    maps.pop();
    Ok(maps)
}

/// The Horrocks resolution K of M: L′ (resolving M^∨) glued to T^{-1}(L^∨) along
/// L′⁰ → M^∨ ⊂ L^{0∨}, then dualized. Coker(K^{-2} → K^{-1}) is M.
pub fn horrocks_resolution<K: Field>(m: &ModulePresentation<K>) -> Result<FreeComplex<K>> {
    let ring = m.ring();
    let l = resolve(m)?;
    let ld = l.dual()?;
    let glue = ld.diff(0)?;
    let lp = kernel_resolution(&glue)?;
    // C: L′ at positions -r..=0, L^∨ at 1..=len+1
    let r = lp.len() as i64 - 1;
    let mut terms: Vec<FreeModule<K>> = Vec::new();
    let mut diffs: Vec<GradedMatrix<K>> = Vec::new();
    for k in (0..lp.len()).rev() {
        terms.push(lp[k].source().clone());
        if k > 0 {
            diffs.push(lp[k].clone());
        }
    }
    if let Some(first) = lp.first() {
        diffs.push(first.clone());
    }
    for p in ld.positions() {
        terms.push(ld.term(p)?);
        if p < ld.hi() {
            diffs.push(ld.diff(p)?);
        }
    }
    let lo = if lp.is_empty() { 1 } else { -r };
    let c = FreeComplex::new(ring, lo, terms, diffs, true)?;
    let k = c.dual()?;
    let pres = k.diff(-2)?;
    ensure(pres.target().gens() == l.term(0)?.gens() && pres == l.diff(-1)?, || {
        "C^{-1} of the Horrocks resolution differs from M".into()
    })?;
    Ok(k)
}

/// Removes all free direct summands: the surjections onto free modules are the
/// elements of M^∨ with a unit coordinate, found from the scalar part of its generators.
pub fn stabilize<K: Field>(m: &ModulePresentation<K>) -> Result<ModulePresentation<K>> {
    let mm = m.minimal()?;
    let rels = mm.relations();
    let dual_gens = kernel_generators(&rels.dual())?;
    let sel = dual_gens.scalar_part().rref().pivot_cols;
    if sel.is_empty() {
        return Ok(mm);
    }
    let rows: Vec<usize> = (0..dual_gens.rows()).collect();
    let psi = dual_gens.submatrix(&rows, &sel).dual();
    let incl = kernel_generators(&psi)?;
    let lifted = incl
        .lift(rels)?
        .ok_or_else(|| Error::Invariant("relations do not lie in the complement of the free part".into()))?;
    ModulePresentation::new(lifted).minimal()
}
