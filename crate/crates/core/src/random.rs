//! Seeded generators of small random inputs, used by the property suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::exactlin::{DenseMatrix, Field};
use crate::homalg::{FreeComplex, FreeModule, GradedMatrix};
use crate::perturb::{split_contraction, Contraction, Operator};
use std::collections::BTreeMap;

use crate::bgg::ModuleComplex;
use crate::rings::{generated_submodule, hom_basis, GradedMap, GradedModule, Ring};

pub type TestRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly random element of F_p, or a small integer over Q.
pub fn element<K: Field>(field: &K, rng: &mut TestRng) -> K::Elem {
    match field.characteristic() {
        0 => field.from_i64(rng.gen_range(-3..=3)),
        p => field.from_i64(rng.gen_range(0..p as i64)),
    }
}

pub fn matrix<K: Field>(field: &K, rows: usize, cols: usize, rng: &mut TestRng) -> DenseMatrix<K> {
    DenseMatrix::from_fn(field, rows, cols, |_, _| element(field, rng))
}

pub fn invertible<K: Field>(field: &K, n: usize, rng: &mut TestRng) -> DenseMatrix<K> {
    loop {
        let m = matrix(field, n, n, rng);
        if m.rank() == n {
            return m;
        }
    }
}

/// Random bounded complex over the ground ring on positions `lo..lo+len`, with generators
/// in the given degrees and at most `max_dim` generators per position and degree.
/// Each degree piece is an elementary complex (V ≅ B shifted, plus H) conjugated by random
/// invertible matrices.
pub fn ground_complex<K: Field>(
    ring: &Ring<K>,
    lo: i64,
    len: usize,
    max_dim: usize,
    degrees: &[i64],
    rng: &mut TestRng,
) -> Result<FreeComplex<K>> {
    let field = ring.field();
    // per degree: dense differentials
    let mut pieces: Vec<(i64, Vec<usize>, Vec<DenseMatrix<K>>)> = Vec::new();
    for &deg in degrees {
        let mut v = vec![0usize; len];
        let mut dims = vec![0usize; len];
        for k in 0..len {
            let b = if k > 0 { v[k - 1] } else { 0 };
            let room = max_dim.saturating_sub(b);
            let h = rng.gen_range(0..=room.min(2));
            v[k] = if k + 1 < len { rng.gen_range(0..=room - h) } else { 0 };
            dims[k] = v[k] + b + h;
        }
        let frames: Vec<DenseMatrix<K>> = dims.iter().map(|&n| invertible(field, n, rng)).collect();
        let mut diffs = Vec::new();
        for k in 0..len.saturating_sub(1) {
            // V^k occupies the first v[k] coordinates, B^{k+1} the next v[k] coordinates of X^{k+1}
            let mut d = DenseMatrix::zeros(field, dims[k + 1], dims[k]);
            let vnext = v[k + 1];
            for i in 0..v[k] {
                d.set(vnext + i, i, field.one());
            }
            let inv = frames[k].inverse().expect("invertible frame");
            diffs.push(frames[k + 1].dot(&d).dot(&inv));
        }
        pieces.push((deg, dims, diffs));
    }
    let terms: Vec<FreeModule<K>> = (0..len)
        .map(|k| {
            let gens = pieces.iter().flat_map(|(deg, dims, _)| std::iter::repeat_n(*deg, dims[k])).collect();
            FreeModule::new(ring, gens)
        })
        .collect();
    let mut diffs = Vec::new();
    for k in 0..len.saturating_sub(1) {
        let mut d = DenseMatrix::zeros(field, terms[k + 1].rank(), terms[k].rank());
        let (mut r0, mut c0) = (0, 0);
        for (_, dims, ds) in &pieces {
            d.set_block(r0, c0, &ds[k]);
            r0 += dims[k + 1];
            c0 += dims[k];
        }
        diffs.push(GradedMatrix::from_scalar(&terms[k], &terms[k + 1], &d)?);
    }
    FreeComplex::new(ring, lo, terms, diffs, true)
}

/// A contraction of a complex filtered by `levels` onto its homology, together with a
/// perturbation that strictly raises the filtration level (so the series terminate).
/// The perturbation is a random conjugation by a unipotent filtered automorphism applied
/// to the differential twisted by an anticommuting map from level 0 to level 1.
pub fn filtered_perturbation<K: Field>(
    ring: &Ring<K>,
    lo: i64,
    len: usize,
    levels: usize,
    max_dim: usize,
    rng: &mut TestRng,
) -> Result<(Contraction<K>, Operator<K>)> {
    let field = ring.field();
    let parts: Vec<FreeComplex<K>> =
        (0..levels).map(|_| ground_complex(ring, lo, len, max_dim, &[0], rng)).collect::<Result<_>>()?;
    let mut c = split_contraction(&parts[0])?;
    for x in &parts[1..] {
        c = c.direct_sum(&split_contraction(x)?)?;
    }
    let dims: Vec<Vec<usize>> = parts.iter().map(|x| x.terms().iter().map(|t| t.rank()).collect()).collect();
    let total: Vec<usize> = (0..len).map(|k| dims.iter().map(|d| d[k]).sum()).collect();
    let offset = |l: usize, k: usize| -> usize { dims[..l].iter().map(|d| d[k]).sum() };
    let big = &c.big;
    let d: Vec<DenseMatrix<K>> = big.diffs().iter().map(|m| m.scalar_part()).collect();
    // Φ = d s - s d from level 0 into level 1, with s of degree 0
    let mut dphi = d.clone();
    if levels >= 2 {
        let s: Vec<DenseMatrix<K>> = (0..len).map(|k| matrix(field, dims[1][k], dims[0][k], rng)).collect();
        for k in 0..len.saturating_sub(1) {
            let d0 = parts[0].diffs()[k].scalar_part();
            let d1 = parts[1].diffs()[k].scalar_part();
            let phi = d1.dot(&s[k]).sub(&s[k + 1].dot(&d0))?;
            let mut block = dphi[k].block(offset(1, k + 1), dims[1][k + 1], 0, dims[0][k]);
            block = block.add(&phi)?;
            dphi[k].set_block(offset(1, k + 1), 0, &block);
        }
    }
    // P = id + N with N strictly raising the level
    let p: Vec<DenseMatrix<K>> = (0..len)
        .map(|k| {
            let mut m = DenseMatrix::identity(field, total[k]);
            for a in 0..levels {
                for b in a + 1..levels {
                    let n = matrix(field, dims[b][k], dims[a][k], rng);
                    m.set_block(offset(b, k), offset(a, k), &n);
                }
            }
            m
        })
        .collect();
    let mut maps = Vec::new();
    for k in 0..len {
        let src = &big.terms()[k];
        if k + 1 < len {
            let pinv = p[k].inverse().expect("unipotent");
            let dhat = p[k + 1].dot(&dphi[k]).dot(&pinv);
            maps.push(GradedMatrix::from_scalar(src, &big.terms()[k + 1], &dhat.sub(&d[k])?)?);
        } else {
            maps.push(GradedMatrix::zero(src, &FreeModule::zero(ring)));
        }
    }
    Ok((c, Operator { degree: 1, lo, maps }))
}

/// A random vector of a module piece.
fn vector<K: Field>(field: &K, len: usize, rng: &mut TestRng) -> Vec<K::Elem> {
    (0..len).map(|_| element(field, rng)).collect()
}

/// Quotient of a free module by the submodule generated by `rels` random elements.
fn random_quotient<K: Field>(free: &GradedModule<K>, rels: usize, rng: &mut TestRng) -> Result<GradedModule<K>> {
    let f = free.field().clone();
    let degs: Vec<i64> = free.degrees().filter(|&d| free.dim(d) > 0).collect();
    if degs.is_empty() {
        return Ok(free.clone());
    }
    let gens: Vec<(i64, Vec<K::Elem>)> = (0..rels)
        .map(|_| {
            let d = degs[rng.gen_range(0..degs.len())];
            (d, vector(&f, free.dim(d), rng))
        })
        .collect();
    let sub = generated_submodule(free, &gens)?;
    Ok(free.quotient(&sub)?.0)
}

/// A random finite-dimensional Λ-module with at most `max_dim` in each degree:
/// a quotient of a free module by random relations, or the dual of one.
pub fn lambda_module<K: Field>(ring: &Ring<K>, max_dim: usize, rng: &mut TestRng) -> Result<GradedModule<K>> {
    loop {
        let ngens = rng.gen_range(1..=2);
        let gens: Vec<i64> = (0..ngens).map(|_| rng.gen_range(-1..=1)).collect();
        let free = FreeModule::new(ring, gens).full_module()?;
        let rels = rng.gen_range(0..=2);
        let mut m = random_quotient(&free, rels, rng)?;
        if rng.gen_bool(0.3) {
            m = m.dual();
        }
        if !m.is_zero() && m.degrees().all(|d| m.dim(d) <= max_dim) {
            return Ok(m);
        }
    }
}

/// A random finite-length graded S-module: S-free generators truncated above a
/// degree, modulo random relations, with at most `max_dim` in each degree.
pub fn finite_s_module<K: Field>(ring: &Ring<K>, max_dim: usize, rng: &mut TestRng) -> Result<GradedModule<K>> {
    loop {
        let ngens = rng.gen_range(1..=2);
        let gens: Vec<i64> = (0..ngens).map(|_| rng.gen_range(-1..=1)).collect();
        let top = rng.gen_range(0..=2);
        let free = FreeModule::new(ring, gens).graded_module(-1, top)?.into_complete();
        let rels = rng.gen_range(0..=2);
        let m = random_quotient(&free, rels, rng)?;
        if !m.is_zero() && m.degrees().all(|d| m.dim(d) <= max_dim) {
            return Ok(m);
        }
    }
}

/// A random element of the space of module maps `a → b`.
pub fn module_map<K: Field>(a: &GradedModule<K>, b: &GradedModule<K>, rng: &mut TestRng) -> Result<GradedMap<K>> {
    let f = a.field();
    let basis = hom_basis(a, b)?;
    let mut out = GradedMap {
        maps: a.degrees().map(|d| (d, DenseMatrix::zeros(f, b.dim(d), a.dim(d)))).collect(),
    };
    for phi in basis {
        let c = element(f, rng);
        for (d, m) in out.maps.iter_mut() {
            if let Some(x) = phi.get(*d) {
                *m = m.add(&x.scale(&c))?;
            }
        }
    }
    Ok(out)
}

/// A random three-term complex A → B → B/im(φ) of Λ-modules starting in position `lo`.
pub fn lambda_complex<K: Field>(ring: &Ring<K>, lo: i64, max_dim: usize, rng: &mut TestRng) -> Result<ModuleComplex<K>> {
    let a = lambda_module(ring, max_dim, rng)?;
    let b = lambda_module(ring, max_dim, rng)?;
    let phi = module_map(&a, &b, rng)?;
    let img: BTreeMap<i64, DenseMatrix<K>> = b
        .degrees()
        .map(|d| (d, crate::bgg::map_in_degree(&phi, &a, &b, d).column_space()))
        .collect();
    let (c, proj) = b.quotient(&img)?;
    ModuleComplex::new(ring, lo, vec![a, b, c], vec![phi, proj])
}

/// A random homogeneous element of degree d.
pub fn homogeneous<K: Field>(ring: &Ring<K>, d: i64, rng: &mut TestRng) -> crate::rings::RingElem<K> {
    let terms = ring.basis(d).into_iter().map(|m| (m, element(ring.field(), rng))).collect();
    ring.from_terms(terms).expect("basis monomials are valid")
}

/// A free S-module with 1..=max_rank generators in degrees `-3..=3`.
pub fn free_s_module<K: Field>(ring: &Ring<K>, max_rank: usize, rng: &mut TestRng) -> FreeModule<K> {
    let r = rng.gen_range(1..=max_rank);
    FreeModule::new(ring, (0..r).map(|_| rng.gen_range(-3..=3)).collect())
}

/// A random presentation over S: 1..=2 generators in degrees `-1..=1` and 0..=3 relations
/// of degree one or two above a generator.
pub fn s_presentation<K: Field>(ring: &Ring<K>, rng: &mut TestRng) -> Result<crate::homalg::ModulePresentation<K>> {
    let gens = free_s_module(ring, 2, rng);
    let gens = FreeModule::new(ring, gens.gens().iter().map(|g| (*g).clamp(-1, 1)).collect());
    let nrels = rng.gen_range(0..=3);
    let mut cols = Vec::new();
    let top = *gens.gens().iter().max().unwrap();
    for _ in 0..nrels {
        let deg = top + rng.gen_range(1..=2);
        cols.push(gens.gens().iter().map(|g| homogeneous(ring, deg - g, rng)).collect());
    }
    crate::homalg::ModulePresentation::from_columns(&gens, cols)
}
