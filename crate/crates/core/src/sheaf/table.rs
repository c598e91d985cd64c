use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::exactlin::Field;
use crate::homalg::{ExtModules, ModulePresentation};

/// h^i(F(d)) for i = 0..=n and d in `d_lo..=d_hi`; `None` marks an unknown entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyTable {
    pub n: usize,
    pub d_lo: i64,
    pub d_hi: i64,
    /// `rows[i][d - d_lo]`
    pub rows: Vec<Vec<Option<usize>>>,
}

impl CohomologyTable {
    pub fn empty(n: usize, d_lo: i64, d_hi: i64) -> Self {
        let w = (d_hi - d_lo + 1).max(0) as usize;
        CohomologyTable { n, d_lo, d_hi, rows: vec![vec![None; w]; n + 1] }
    }

    pub fn get(&self, i: usize, d: i64) -> Option<usize> {
        if i > self.n || d < self.d_lo || d > self.d_hi {
            return None;
        }
        self.rows[i][(d - self.d_lo) as usize]
    }

    pub fn set(&mut self, i: usize, d: i64, v: Option<usize>) {
        if i <= self.n && d >= self.d_lo && d <= self.d_hi {
            self.rows[i][(d - self.d_lo) as usize] = v;
        }
    }

    /// True when every known entry is zero.
    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(|v| v.unwrap_or(0) == 0)
    }

    /// Entries known in both tables, as (i, d, self, other) where they differ.
    pub fn disagreements(&self, other: &CohomologyTable) -> Vec<(usize, i64, usize, usize)> {
        let mut out = Vec::new();
        for i in 0..=self.n.min(other.n) {
            for d in self.d_lo.max(other.d_lo)..=self.d_hi.min(other.d_hi) {
                if let (Some(a), Some(b)) = (self.get(i, d), other.get(i, d)) {
                    if a != b {
                        out.push((i, d, a, b));
                    }
                }
            }
        }
        out
    }

    /// Aligned text: rows i = n down to 0, columns d ascending; `.` is zero, `?` unknown.
    pub fn to_text(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|v| match v {
                        None => "?".to_string(),
                        Some(0) => ".".to_string(),
                        Some(x) => x.to_string(),
                    })
                    .collect()
            })
            .collect();
        let heads: Vec<String> = (self.d_lo..=self.d_hi).map(|d| d.to_string()).collect();
        let w = cells.iter().flatten().chain(&heads).map(|s| s.len()).max().unwrap_or(1) + 1;
        let mut s = String::new();
        for i in (0..=self.n).rev() {
            s.push_str(&format!("h^{i:<3}|"));
            for c in &cells[i] {
                s.push_str(&format!("{c:>w$}"));
            }
            s.push('\n');
        }
        s.push_str(&format!("{:<5}|", "d"));
        for h in &heads {
            s.push_str(&format!("{h:>w$}"));
        }
        s.push('\n');
        s
    }
}

/// h^i(M̃(d)) from graded Serre duality: rows 0 < i ≤ n are dim Ext^{n-i}(M, ω_S)_{-d};
/// row 0 is dim M_d corrected by Ext^{n+1} and Ext^n.
pub fn cohomology_table<K: Field>(m: &ModulePresentation<K>, d_lo: i64, d_hi: i64) -> Result<CohomologyTable> {
    ensure(d_lo <= d_hi, || format!("empty window {d_lo}..{d_hi}"))?;
    let ext = ExtModules::new(m)?;
    table_from_ext(m, &ext, d_lo, d_hi)
}

pub(crate) fn table_from_ext<K: Field>(
    m: &ModulePresentation<K>,
    ext: &ExtModules<K>,
    d_lo: i64,
    d_hi: i64,
) -> Result<CohomologyTable> {
    let n = m.ring().n();
    let ni = n as i64;
    let mut t = CohomologyTable::empty(n, d_lo, d_hi);
    for d in d_lo..=d_hi {
        for i in 1..=n {
            t.set(i, d, Some(ext.dim(ni - i as i64, -d)?));
        }
        let h0 = m.dim(d) as i64 - ext.dim(ni + 1, -d)? as i64 + ext.dim(ni, -d)? as i64;
        ensure(h0 >= 0, || format!("negative h^0 in degree {d}"))?;
        t.set(0, d, Some(h0 as usize));
    }
    Ok(t)
}
