use std::collections::BTreeSet;

use super::contraction::Contraction;
use super::operator::Operator;
use crate::error::{Error, Result};
use crate::exactlin::{DenseMatrix, Field};
use crate::homalg::{FreeComplex, FreeModule, GradedMatrix};

/// Contraction of a complex with constant differential onto its homology
/// (zero differential), via X = V ⊕ B ⊕ H in each term and each generator degree.
pub fn split_contraction<K: Field>(x: &FreeComplex<K>) -> Result<Contraction<K>> {
    let field = x.field().clone();
    let lo = x.lo();
    let len = x.terms().len();
    for p in lo..lo + len as i64 - 1 {
        let d = x.diff(p)?;
        if d.without_units() != GradedMatrix::zero(d.source(), d.target()) {
            return Err(Error::InvalidInput(format!("differential at position {p} is not constant")));
        }
    }
    let degrees: BTreeSet<i64> = x.terms().iter().flat_map(|t| t.gens().iter().copied()).collect();
    // per position: homology generators (indices into the degree-ordered small term)
    let mut small_gens: Vec<Vec<i64>> = vec![Vec::new(); len];
    // per position and degree: (indices of X^p gens of that degree, H basis columns, projection rows onto H, h block)
    struct Piece<K: Field> {
        idx: Vec<usize>,
        h_basis: DenseMatrix<K>,
        f_rows: DenseMatrix<K>,
        // h^p restricted: X^p_δ → X^{p-1}_δ in local coordinates
        h_loc: DenseMatrix<K>,
        small_offset: usize,
    }
    let mut pieces: Vec<Vec<Piece<K>>> = (0..len).map(|_| Vec::new()).collect();
    for &deg in &degrees {
        let idx: Vec<Vec<usize>> =
            x.terms().iter().map(|t| (0..t.rank()).filter(|&i| t.gens()[i] == deg).collect()).collect();
        let dloc: Vec<DenseMatrix<K>> = (0..len.saturating_sub(1))
            .map(|k| x.diffs()[k].scalar_part().select_rows(&idx[k + 1]).select_cols(&idx[k]))
            .collect();
        // bases per position: [V | B | H] and their inverses
        let mut frames: Vec<(DenseMatrix<K>, DenseMatrix<K>, usize, usize, usize)> = Vec::new();
        for k in 0..len {
            let n = idx[k].len();
            let dout = if k + 1 < len { dloc[k].clone() } else { DenseMatrix::zeros(&field, 0, n) };
            let din = if k > 0 { dloc[k - 1].clone() } else { DenseMatrix::zeros(&field, n, 0) };
            let b = din.column_space();
            let z = dout.kernel_basis();
            // H: extend B to a basis of Z, using kernel basis columns
            let hz = b.hstack(&z)?.rref();
            let hcols: Vec<usize> = hz.pivot_cols.iter().filter(|&&c| c >= b.cols()).map(|&c| c - b.cols()).collect();
            let h = z.select_cols(&hcols);
            // V: extend Z to the whole space with standard vectors
            let vcoords = z.complement_coordinates();
            let mut v = DenseMatrix::zeros(&field, n, vcoords.len());
            for (j, &c) in vcoords.iter().enumerate() {
                v.set(c, j, field.one());
            }
            let frame = v.hstack(&b)?.hstack(&h)?;
            let inv = frame.inverse().ok_or_else(|| Error::Invariant("splitting frame not invertible".into()))?;
            frames.push((frame, inv, v.cols(), b.cols(), h.cols()));
        }
        for k in 0..len {
            let (frame, inv, nv, nb, nh) = &frames[k];
            let h_basis = frame.block(0, frame.rows(), nv + nb, *nh);
            let f_rows = inv.block(nv + nb, *nh, 0, inv.cols());
            // h: B^p coordinates → V^{p-1} via the inverse of d: V^{p-1} ≅ B^p
            let h_loc = if k > 0 {
                let (pframe, _, pv, _, _) = &frames[k - 1];
                let vprev = pframe.block(0, pframe.rows(), 0, *pv);
                let bcur = frame.block(0, frame.rows(), *nv, *nb);
                // d(vprev) expressed in bcur coordinates
                let dv = dloc[k - 1].dot(&vprev);
                let coeff = bcur
                    .solve_matrix(&dv)?
                    .ok_or_else(|| Error::Invariant("image of V not in B".into()))?;
                let cinv = coeff.inverse().ok_or_else(|| Error::Invariant("V → B not invertible".into()))?;
                let brows = inv.block(*nv, *nb, 0, inv.cols());
                vprev.dot(&cinv).dot(&brows)
            } else {
                DenseMatrix::zeros(&field, 0, idx[k].len())
            };
            let small_offset = small_gens[k].len();
            small_gens[k].extend(std::iter::repeat_n(deg, *nh));
            pieces[k].push(Piece { idx: idx[k].clone(), h_basis, f_rows, h_loc, small_offset });
        }
    }
    let ring = x.ring();
    let small_terms: Vec<FreeModule<K>> = small_gens.iter().map(|g| FreeModule::new(ring, g.clone())).collect();
    let small_diffs =
        (0..len.saturating_sub(1)).map(|k| GradedMatrix::zero(&small_terms[k], &small_terms[k + 1])).collect();
    let small = FreeComplex::new(ring, lo, small_terms.clone(), small_diffs, x.is_bounded())?;
    let mut f = Vec::new();
    let mut g = Vec::new();
    let mut h = Vec::new();
    for k in 0..len {
        let xt = &x.terms()[k];
        let yt = &small_terms[k];
        let mut fm = DenseMatrix::zeros(&field, yt.rank(), xt.rank());
        let mut gm = DenseMatrix::zeros(&field, xt.rank(), yt.rank());
        let prev_rank = if k > 0 { x.terms()[k - 1].rank() } else { 0 };
        let mut hm = DenseMatrix::zeros(&field, prev_rank, xt.rank());
        for (pi, pc) in pieces[k].iter().enumerate() {
            for r in 0..pc.f_rows.rows() {
                for c in 0..pc.f_rows.cols() {
                    fm.set(pc.small_offset + r, pc.idx[c], pc.f_rows.get(r, c).clone());
                }
            }
            for r in 0..pc.h_basis.rows() {
                for c in 0..pc.h_basis.cols() {
                    gm.set(pc.idx[r], pc.small_offset + c, pc.h_basis.get(r, c).clone());
                }
            }
            if k > 0 {
                let prev_idx = &pieces[k - 1][pi].idx;
                for r in 0..pc.h_loc.rows() {
                    for c in 0..pc.h_loc.cols() {
                        hm.set(prev_idx[r], pc.idx[c], pc.h_loc.get(r, c).clone());
                    }
                }
            }
        }
        f.push(GradedMatrix::from_scalar(xt, yt, &fm)?);
        g.push(GradedMatrix::from_scalar(yt, xt, &gm)?);
        let prev = if k > 0 { x.terms()[k - 1].clone() } else { FreeModule::zero(ring) };
        h.push(GradedMatrix::from_scalar(xt, &prev, &hm)?);
    }
    let c = Contraction {
        big: x.clone(),
        small,
        f: Operator { degree: 0, lo, maps: f },
        g: Operator { degree: 0, lo, maps: g },
        h: Operator { degree: -1, lo, maps: h },
    };
    c.verify()?;
    Ok(c)
}
