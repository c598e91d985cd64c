use super::ht::{ht_from_strand, HTComplex};
use crate::error::{ensure, Error, Result};
use crate::exactlin::Field;
use crate::homalg::{resolve, HilbertData, ModulePresentation};

/// An Eilenberg–MacLane sheaf: H^j_* F = 0 for 0 < j < n except H^i_* F ≅ H = (E ⊗ ω_S)*.
#[derive(Clone, Debug)]
pub struct EmSheaf<K: Field> {
    pub e: ModulePresentation<K>,
    pub i: usize,
    /// Coker((Q^{-n+i+1})^∨ → (Q^{-n+i})^∨) for the minimal resolution Q of E
    pub module: ModulePresentation<K>,
    pub e_krull: i64,
}

/// Builds M from E by resolving, dualizing and taking the cokernel in position n-i.
pub fn em_sheaf<K: Field>(e: &ModulePresentation<K>, i: usize) -> Result<EmSheaf<K>> {
    let n = e.ring().n();
    if i == 0 || i >= n {
        return Err(Error::InvalidInput(format!("need 0 < i < n, got i = {i}, n = {n}")));
    }
    let e_krull = HilbertData::of(e)?.krull_dim;
    if e_krull > i as i64 + 1 {
        return Err(Error::InvalidInput(format!("E has Krull dimension {e_krull} > i+1 = {}", i + 1)));
    }
    let qd = resolve(e)?.dual()?;
    let p = (n - i) as i64;
    let module = ModulePresentation::new(qd.diff(p - 1)?);
    ensure(module.gens().gens() == qd.term(p)?.gens(), || "cokernel taken in the wrong position".into())?;
    Ok(EmSheaf { e: e.clone(), i, module, e_krull })
}

impl<K: Field> EmSheaf<K> {
    /// dim H_d = dim E_{-d-n-1}.
    pub fn h_dim(&self, d: i64) -> usize {
        self.e.dim(-d - self.e.ring().n() as i64 - 1)
    }

    /// The predicted HT complex T^{-i} G(H) on positions `lo..=hi`.
    pub fn expected_ht(&self, lo: i64, hi: i64) -> Result<HTComplex<K>> {
        ht_from_strand(&self.e, self.i, lo, hi)
    }
}
