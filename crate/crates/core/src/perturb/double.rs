use std::collections::BTreeMap;

use super::bpl::bpl;
use super::contraction::Contraction;
use super::operator::Operator;
use super::split::split_contraction;
use crate::error::{ensure, Error, Result};
use crate::exactlin::{DenseMatrix, Field};
use crate::homalg::{DoubleComplex, FreeComplex, FreeModule, GradedMatrix, TotLayout};

/// A complex with an increasing filtration by generator classes, where
/// `F_m` (generators of class ≤ m) is a subcomplex.
#[derive(Clone, Debug)]
pub struct FilteredMinimalComplex<K: Field> {
    pub complex: FreeComplex<K>,
    /// class of each generator, per position
    pub classes: Vec<Vec<i64>>,
    /// contraction from the complex it was extracted from, when available
    pub contraction: Option<Contraction<K>>,
}

impl<K: Field> FilteredMinimalComplex<K> {
    pub fn classes_at(&self, t: i64) -> &[i64] {
        let k = t - self.complex.lo();
        if k < 0 || k as usize >= self.classes.len() {
            &[]
        } else {
            &self.classes[k as usize]
        }
    }

    /// Checks that the differential never raises the class, so every F_m is a subcomplex.
    pub fn check_filtration(&self) -> Result<()> {
        let c = &self.complex;
        for t in c.lo()..c.hi() {
            let Some(d) = c.diff_ref(t) else { continue };
            let (src, tgt) = (self.classes_at(t), self.classes_at(t + 1));
            for i in 0..d.rows() {
                for j in 0..d.cols() {
                    ensure(d.entry(i, j).is_zero() || tgt[i] <= src[j], || {
                        format!("differential raises class at position {t}")
                    })?;
                }
            }
        }
        Ok(())
    }

    /// Rank of F_m in position t.
    pub fn filtration_rank(&self, m: i64, t: i64) -> usize {
        self.classes_at(t).iter().filter(|&&c| c <= m).count()
    }

    /// Number of generators of class exactly `m` and generator degree `deg` at position t.
    pub fn strand_count(&self, m: i64, t: i64, deg: i64) -> usize {
        let Some(term) = self.complex.term_ref(t) else { return 0 };
        self.classes_at(t).iter().zip(term.gens()).filter(|(c, g)| **c == m && **g == deg).count()
    }

    /// The subquotient F_b / F_{a-1}: generators with class in `a..=b`, induced differential.
    pub fn subquotient(&self, a: i64, b: i64) -> Result<FilteredMinimalComplex<K>> {
        let c = &self.complex;
        let keep: Vec<Vec<usize>> =
            self.classes.iter().map(|cl| (0..cl.len()).filter(|&i| cl[i] >= a && cl[i] <= b).collect()).collect();
        let terms: Vec<FreeModule<K>> = c.terms().iter().zip(&keep).map(|(t, k)| t.select(k)).collect();
        let diffs = (0..c.diffs().len()).map(|k| c.diffs()[k].submatrix(&keep[k + 1], &keep[k])).collect();
        let complex = FreeComplex::new(c.ring(), c.lo(), terms, diffs, c.is_bounded())?;
        let classes = self.classes.iter().zip(&keep).map(|(cl, k)| k.iter().map(|&i| cl[i]).collect()).collect();
        Ok(FilteredMinimalComplex { complex, classes, contraction: None })
    }

    /// The part of the differential between generators of equal class.
    pub fn linear_part(&self) -> Result<FreeComplex<K>> {
        let c = &self.complex;
        let mut diffs = Vec::new();
        for k in 0..c.diffs().len() {
            let d = &c.diffs()[k];
            let mut m = GradedMatrix::zero(d.source(), d.target());
            for i in 0..d.rows() {
                for j in 0..d.cols() {
                    if self.classes[k + 1][i] == self.classes[k][j] {
                        m.set_entry(i, j, d.entry(i, j).clone())?;
                    }
                }
            }
            diffs.push(m);
        }
        FreeComplex::new(c.ring(), c.lo(), c.terms().to_vec(), diffs, c.is_bounded())
    }
}

fn horizontal_only<K: Field>(x: &DoubleComplex<K>) -> DoubleComplex<K> {
    DoubleComplex { ring: x.ring.clone(), terms: x.terms.clone(), dh: x.dh.clone(), dv: BTreeMap::new() }
}

/// Which (p, q) block a column of a term in the total complex belongs to.
fn block_of(layout: &TotLayout, t: i64, row: usize) -> Option<(i64, i64)> {
    layout.blocks_at(t).iter().find(|(_, _, off, r)| row >= *off && row < off + r).map(|(p, q, _, _)| (*p, *q))
}

/// Contraction of tot(X) onto a complex Y with Y^t = ⊕ H_I^{p,t-p}(X), filtered by p.
/// Rows (fixed q, varying p) must have constant horizontal differential.
pub fn minimalize_double<K: Field>(x: &DoubleComplex<K>) -> Result<FilteredMinimalComplex<K>> {
    x.check()?;
    let (tot, layout) = x.total()?;
    if tot.terms().is_empty() {
        return Ok(FilteredMinimalComplex { complex: tot.clone(), classes: Vec::new(), contraction: Some(Contraction::identity(&tot)) });
    }
    let (t0, layout0) = horizontal_only(x).total()?;
    ensure(layout0 == layout, || "layouts of total complexes disagree".into())?;
    let split = split_contraction(&t0)?;
    let pert = Operator::differential(&tot).sub(&Operator::differential(&t0))?;
    let width = {
        let ps: Vec<i64> = x.terms.keys().map(|(p, _)| *p).collect();
        (ps.iter().max().unwrap() - ps.iter().min().unwrap()) as usize + 1
    };
    let c = bpl(&split, &pert, width + 1)?;
    // classes from the support of g
    let mut classes = Vec::new();
    for t in c.small.positions() {
        let g = c.g.at(t).unwrap();
        let mut cl = Vec::with_capacity(g.cols());
        for j in 0..g.cols() {
            let mut blocks = (0..g.rows()).filter(|&i| !split.g.at(t).unwrap().entry(i, j).is_zero()).filter_map(|i| block_of(&layout, t, i));
            let first = blocks.next().ok_or_else(|| Error::Invariant("homology class with empty support".into()))?;
            ensure(blocks.all(|b| b == first), || "homology generator spans several columns".into())?;
            cl.push(first.0);
        }
        classes.push(cl);
    }
    let out = FilteredMinimalComplex { complex: c.small.clone(), classes, contraction: Some(c) };
    out.check_filtration()?;
    Ok(out)
}

/// Horizontal homology H_I of X at (p, q) in generator degree d: a dimension.
pub fn row_homology_dims<K: Field>(x: &DoubleComplex<K>) -> Result<BTreeMap<(i64, i64), BTreeMap<i64, usize>>> {
    let mut out = BTreeMap::new();
    for &(p, q) in x.terms.keys() {
        let t = x.term(p, q);
        let mut per = BTreeMap::new();
        let mut degs: Vec<i64> = t.gens().to_vec();
        degs.sort();
        degs.dedup();
        for d in degs {
            let idx = |m: &FreeModule<K>| -> Vec<usize> { (0..m.rank()).filter(|&i| m.gens()[i] == d).collect() };
            let here = idx(&t);
            let out_m = x.h(p, q).scalar_part().select_cols(&here).select_rows(&idx(&x.term(p + 1, q)));
            let in_m = x.h(p - 1, q).scalar_part().select_rows(&here).select_cols(&idx(&x.term(p - 1, q)));
            let h = here.len() - out_m.rank() - in_m.rank();
            if h > 0 {
                per.insert(d, h);
            }
        }
        if !per.is_empty() {
            out.insert((p, q), per);
        }
    }
    Ok(out)
}

/// τ_I^{≤m}: rows truncated after column m, with ker d' in column m.
pub fn truncate_rows<K: Field>(x: &DoubleComplex<K>, m: i64) -> Result<DoubleComplex<K>> {
    let ring = x.ring.clone();
    let field = ring.field().clone();
    let mut out = DoubleComplex::new(&ring);
    let mut incl: BTreeMap<i64, GradedMatrix<K>> = BTreeMap::new();
    for (&(p, q), t) in &x.terms {
        if p < m {
            out.terms.insert((p, q), t.clone());
        } else if p == m {
            let d = x.h(p, q);
            let sc = d.scalar_part();
            let mut vecs: Vec<(i64, Vec<K::Elem>)> = Vec::new();
            let mut degs: Vec<i64> = t.gens().to_vec();
            degs.sort();
            degs.dedup();
            for deg in degs {
                let here: Vec<usize> = (0..t.rank()).filter(|&i| t.gens()[i] == deg).collect();
                let k = sc.select_cols(&here).kernel_basis();
                for c in 0..k.cols() {
                    let mut v = vec![field.zero(); t.rank()];
                    for (r, &i) in here.iter().enumerate() {
                        v[i] = k.get(r, c).clone();
                    }
                    vecs.push((deg, v));
                }
            }
            let kmod = FreeModule::new(&ring, vecs.iter().map(|(d, _)| *d).collect());
            let mat = DenseMatrix::from_columns(&field, t.rank(), &vecs.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>());
            let iota = GradedMatrix::from_scalar(&kmod, t, &mat)?;
            out.terms.insert((p, q), kmod);
            incl.insert(q, iota);
        }
    }
    for &(p, q) in out.terms.clone().keys() {
        if p < m - 1 {
            out.dh.insert((p, q), x.h(p, q));
        } else if p == m - 1 {
            let d = x.h(p, q);
            let target = out.term(m, q);
            let lifted = match incl.get(&q) {
                Some(i) => i.lift(&d)?.ok_or_else(|| Error::Invariant("horizontal map misses the kernel".into()))?,
                None => GradedMatrix::zero(d.source(), &target),
            };
            out.dh.insert((p, q), lifted);
        }
        if p < m {
            out.dv.insert((p, q), x.v(p, q));
        } else if p == m {
            let i0 = incl.get(&q).cloned().unwrap();
            let composed = i0.then(&x.v(p, q))?;
            let tgt_kernel = incl.get(&(q + 1)).cloned();
            let lifted = match tgt_kernel {
                Some(i1) => i1.lift(&composed)?.ok_or_else(|| Error::Invariant("vertical map leaves the kernel".into()))?,
                None => {
                    ensure(composed.is_zero(), || "vertical map into a missing term".into())?;
                    GradedMatrix::zero(i0.source(), &FreeModule::zero(&ring))
                }
            };
            out.dv.insert((p, q), lifted);
        }
    }
    out.check()?;
    Ok(out)
}
