use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::window::{kernel_module, TateWindow};
use crate::bgg::f_module;
use crate::error::{Error, Result};
use crate::exactlin::Field;
use crate::rings::{GradedModule, Monomial};

/// Z^m = ker(I^m → I^{m+1}) and the comparison of H^{i-m}(F(Z^m))_j with h^i(F(j)) for
/// j ≥ m-i (and with 0 below).
#[derive(Clone, Debug)]
pub struct KernelReport<K: Field> {
    pub m: i64,
    pub z: GradedModule<K>,
    pub soc_annihilates: bool,
    pub rows: Vec<KernelRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelRow {
    pub i: usize,
    pub j: i64,
    /// dim H^{i-m}(F(Z^m))_j
    pub computed: usize,
    /// h^i(F(j)) for j ≥ m-i, else 0
    pub expected: usize,
}

impl<K: Field> KernelReport<K> {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.computed == r.expected)
    }

    pub fn z_dims(&self) -> BTreeMap<i64, usize> {
        self.z.degrees().map(|d| (d, self.z.dim(d))).filter(|(_, v)| *v > 0).collect()
    }
}

/// Extracts Z^m at an interior position, checks soc(Λ)·Z^m = 0 and compares the homology
/// of F(Z^m) with the truncated cohomology sums for j in `m-i-2..=m+span`.
pub fn kernel_module_check<K: Field>(t: &TateWindow<K>, m: i64, span: i64) -> Result<KernelReport<K>> {
    if m <= t.lo || m >= t.hi {
        return Err(Error::InvalidInput(format!("position {m} is not interior to {}..{}", t.lo, t.hi)));
    }
    let (z, _) = kernel_module(&t.full.diff(m)?)?;
    let l = z.ring();
    let top = Monomial::from_indices(l.nvars(), &(0..l.nvars()).collect::<Vec<_>>());
    let mut soc_annihilates = true;
    for d in z.degrees() {
        if !z.act_monomial(&top, d)?.is_zero() {
            soc_annihilates = false;
        }
    }
    let fz = f_module(&z)?;
    let n = t.n as i64;
    let table = t.cohomology_table_range(m - n - 2, m + span)?;
    let mut rows = Vec::new();
    for i in 0..=n {
        for j in m - i - 2..=m + span {
            let computed = fz.homology_dim(i - m, j)?;
            let expected = if j >= m - i { table.get(i as usize, j).expect("inside the table") } else { 0 };
            rows.push(KernelRow { i: i as usize, j, computed, expected });
        }
    }
    Ok(KernelReport { m, z, soc_annihilates, rows })
}
