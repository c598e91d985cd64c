use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::window::TateWindow;
use crate::bgg::g_module;
use crate::error::{ensure, Result};
use crate::exactlin::Field;
use crate::homalg::{BettiTable, HilbertData, ModulePresentation};
use crate::perturb::FilteredMinimalComplex;

/// The Horrocks–Trautmann complex: strands 1..=n-1 of a Tate window.
#[derive(Clone, Debug)]
pub struct HTComplex<K: Field> {
    pub complex: FilteredMinimalComplex<K>,
    pub n: usize,
    /// some strand 1..=n-1 reaches an end of the window
    pub partial: bool,
    /// strand i → Krull dimension of the finitely generated dual of its module
    pub strand_dual_krull: BTreeMap<usize, i64>,
}

/// Isomorphism invariants of an HT complex: generator degrees per position and the
/// rank of every differential in every internal degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HtNormalForm {
    pub betti: BettiTable,
    /// (position, internal degree, rank), nonzero ranks only
    pub ranks: Vec<(i64, i64, usize)>,
}

/// F_{n-1}I / F_0 I of a Tate window.
pub fn ht_complex<K: Field>(t: &TateWindow<K>) -> Result<HTComplex<K>> {
    let n = t.n as i64;
    let complex = t.window.subquotient(1, n - 1)?;
    let partial = [t.lo, t.hi].iter().any(|&p| complex.classes_at(p).iter().any(|&c| c >= 1 && c < n));
    let strand_dual_krull = (1..t.n).map(|i| (i, t.ext_krull[i])).collect();
    let ht = HTComplex { complex, n: t.n, partial, strand_dual_krull };
    ensure(ht.structure_holds(), || "HT complex has a generator outside strands 1..n-1".into())?;
    ensure(ht.complex.complex.is_minimal(), || "HT complex is not minimal".into())?;
    Ok(ht)
}

/// T^{-i} G(H) with H = (E ⊗ ω_S)* on positions `lo..=hi`, as an HT complex with a single strand.
pub fn ht_from_strand<K: Field>(e: &ModulePresentation<K>, i: usize, lo: i64, hi: i64) -> Result<HTComplex<K>> {
    let n = e.ring().n();
    let n1 = n as i64 + 1;
    let ii = i as i64;
    // G(H) on positions lo-i..=hi-i needs H in those degrees, i.e. E(-n-1) in -(hi-i)..=-(lo-i)
    let (a, b) = (lo - ii, hi - ii);
    let h = e.graded_module(-b - n1, -a - n1)?.twist(-n1).dual();
    let g = g_module(&h, a, b)?.translate(-ii).with_bounded(false);
    let classes = g.terms().iter().map(|t| vec![ii; t.rank()]).collect();
    let complex = FilteredMinimalComplex { complex: g, classes, contraction: None };
    let krull = HilbertData::of(e)?.krull_dim;
    let partial = [lo, hi].iter().any(|&p| !complex.classes_at(p).is_empty());
    Ok(HTComplex { complex, n, partial, strand_dual_krull: BTreeMap::from([(i, krull)]) })
}

impl<K: Field> HTComplex<K> {
    /// F_{n-1}G = G and F_0 G = 0.
    pub fn structure_holds(&self) -> bool {
        let n = self.n as i64;
        self.complex.classes.iter().flatten().all(|&c| c >= 1 && c < n)
    }

    /// c_{p,i} over the stored positions.
    pub fn strand_counts(&self) -> BTreeMap<(i64, usize), usize> {
        let mut out = BTreeMap::new();
        for p in self.complex.complex.positions() {
            for &c in self.complex.classes_at(p) {
                *out.entry((p, c as usize)).or_insert(0) += 1;
            }
        }
        out
    }

    pub fn normal_form(&self) -> HtNormalForm {
        let c = &self.complex.complex;
        let mut ranks = Vec::new();
        for p in c.lo()..c.hi() {
            let d = c.diff_ref(p).expect("stored differential");
            if let Some((a, b)) = c.term(p).ok().and_then(|t| t.degree_span()) {
                for e in a..=b {
                    let r = d.slice(e).rank();
                    if r > 0 {
                        ranks.push((p, e, r));
                    }
                }
            }
        }
        HtNormalForm { betti: c.trimmed().betti(), ranks }
    }
}

/// Verdicts on the two Horrocks–Trautmann conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HtReport {
    /// every generator lies in a strand 1..=n-1
    pub structure: bool,
    /// every strand i has a dual module of Krull dimension ≤ i+1
    pub growth: bool,
    pub strand_dual_krull: BTreeMap<usize, i64>,
    /// strand i → (p, c_{-p,i}) for p in the growth window
    pub counts: BTreeMap<usize, Vec<(i64, usize)>>,
}

/// Condition (1) structurally; condition (2) through the Krull dimension of each strand's
/// dual module, with the raw counts c_{-p,i} for p in `growth_lo..=growth_hi`.
pub fn ht_conditions<K: Field>(g: &HTComplex<K>, growth_lo: i64, growth_hi: i64) -> HtReport {
    let growth = g.strand_dual_krull.iter().all(|(i, d)| *d <= *i as i64 + 1);
    let sc = g.strand_counts();
    let mut counts = BTreeMap::new();
    for i in 1..g.n {
        let row: Vec<(i64, usize)> = (growth_lo..=growth_hi).map(|p| (p, sc.get(&(-p, i)).copied().unwrap_or(0))).collect();
        counts.insert(i, row);
    }
    HtReport { structure: g.structure_holds(), growth, strand_dual_krull: g.strand_dual_krull.clone(), counts }
}
