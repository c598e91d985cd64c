use koszul::exactlin::{DenseMatrix, Fp};
use koszul::homalg::{resolve, FreeComplex, FreeModule, GradedMatrix, ModulePresentation};
use koszul::perturb::{bpl, cancel, minimize, normalize, split_contraction, unit_splits, Contraction, Identity, Operator, TermSplit};
use koszul::random::{filtered_perturbation, ground_complex, matrix, seeded, TestRng};
use koszul::rings::Ring;

/// Independent oracle: rank mod p by plain elimination on u64 rows.
fn rank_mod(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][c].is_multiple_of(p)) else { continue };
        rows.swap(rank, piv);
        let inv = (1..p).find(|x| x * rows[rank][c] % p == 1).unwrap();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_multiple_of(p) {
                let f = rows[r][c] * inv % p;
                for k in 0..ncols {
                    rows[r][k] = (rows[r][k] + p * p - f * rows[rank][k] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn scalar_rows(m: &GradedMatrix<Fp>, rows: &[usize], cols: &[usize]) -> Vec<Vec<u64>> {
    rows.iter().map(|&i| cols.iter().map(|&j| m.entry(i, j).constant().map_or(0, |&c| c as u64)).collect()).collect()
}

fn of_degree(t: &FreeModule<Fp>, d: i64) -> Vec<usize> {
    (0..t.rank()).filter(|&i| t.gens()[i] == d).collect()
}

/// dim H^p in generator degree d of a complex with constant differential.
fn oracle_homology(c: &FreeComplex<Fp>, p: i64, d: i64) -> usize {
    let prime = c.field().prime() as u64;
    let here = c.term(p).unwrap();
    let idx = of_degree(&here, d);
    let out = if p < c.hi() {
        let next = c.term(p + 1).unwrap();
        rank_mod(scalar_rows(&c.diff(p).unwrap(), &of_degree(&next, d), &idx), prime)
    } else {
        0
    };
    let inc = if p > c.lo() {
        let prev = c.term(p - 1).unwrap();
        rank_mod(scalar_rows(&c.diff(p - 1).unwrap(), &idx, &of_degree(&prev, d)), prime)
    } else {
        0
    };
    idx.len() - out - inc
}

fn assert_same_homology(x: &FreeComplex<Fp>, y: &FreeComplex<Fp>, degrees: &[i64]) {
    for p in x.positions() {
        for &d in degrees {
            assert_eq!(oracle_homology(x, p, d), oracle_homology(y, p, d), "position {p}, degree {d}");
        }
    }
}

fn ground(p: u32) -> Ring<Fp> {
    Ring::ground(Fp::new(p).unwrap())
}

fn random_operator(rng: &mut TestRng, src: &FreeComplex<Fp>, tgt: &FreeComplex<Fp>, degree: i64) -> Operator<Fp> {
    let field = *src.field();
    let mut op = Operator::zero(src, tgt, degree);
    for p in src.positions() {
        let (a, b) = (src.term(p).unwrap(), tgt.term(p + degree).unwrap_or_else(|_| FreeModule::zero(src.ring())));
        // entries only between equal generator degrees
        let mut m = matrix(&field, b.rank(), a.rank(), rng);
        for i in 0..b.rank() {
            for j in 0..a.rank() {
                if a.gens()[j] != b.gens()[i] {
                    m.set(i, j, 0);
                }
            }
        }
        op.set(p, GradedMatrix::from_scalar(&a, &b, &m).unwrap());
    }
    op
}

#[test]
fn normalize_random_raw_data() {
    for prime in [5, 7] {
        let r = ground(prime);
        let mut rng = seeded(prime as u64);
        for _ in 0..40 {
            let x = ground_complex(&r, -1, 4, 3, &[0, 1], &mut rng).unwrap();
            let c = split_contraction(&x).unwrap();
            // h + dk - kd with k of degree -2 keeps (i) and (ii) but breaks the side conditions
            let k = random_operator(&mut rng, &x, &x, -2);
            let d = Operator::differential(&x);
            let raw_h = c.h.add(&k.then(&d).unwrap()).unwrap().sub(&d.then(&k).unwrap()).unwrap();
            let out = normalize(&x, &c.small, &c.f, &c.g, &raw_h).unwrap();
            assert_eq!(out.check_identities(), Ok(()));
        }
    }
}

#[test]
fn normalize_keeps_normalized_input() {
    let r = ground(5);
    let mut rng = seeded(1);
    let x = ground_complex(&r, 0, 3, 3, &[0], &mut rng).unwrap();
    let c = split_contraction(&x).unwrap();
    let out = normalize(&x, &c.small, &c.f, &c.g, &c.h).unwrap();
    assert_eq!(out.h, c.h);
}

#[test]
fn normalize_rejects_broken_homotopy() {
    let r = ground(5);
    let one = FreeModule::new(&r, vec![0]);
    let x = FreeComplex::single(&one, 0);
    let zero = FreeComplex::new(&r, 0, vec![FreeModule::zero(&r)], vec![], true).unwrap();
    let f = Operator::zero(&x, &zero, 0);
    let g = Operator::zero(&zero, &x, 0);
    let h = Operator::zero(&x, &x, -1);
    let err = normalize(&x, &zero, &f, &g, &h).unwrap_err().to_string();
    assert!(err.contains(&Identity::Homotopy.to_string()), "{err}");
}

#[test]
fn cancel_identity_pair() {
    let r = ground(5);
    let one = FreeModule::new(&r, vec![0]);
    let x = FreeComplex::new(&r, 0, vec![one.clone(), one.clone()], vec![GradedMatrix::identity(&one)], true).unwrap();
    let splits = vec![TermSplit { v: vec![0], w: vec![], y: vec![] }, TermSplit { v: vec![], w: vec![0], y: vec![] }];
    let c = cancel(&x, &splits).unwrap();
    assert!(c.small.terms().iter().all(|t| t.is_zero()));
    let none = vec![TermSplit { v: vec![], w: vec![], y: vec![0] }; 2];
    let c = cancel(&x, &none).unwrap();
    assert_eq!(c.small, x);
    let bad = vec![TermSplit { v: vec![0], w: vec![], y: vec![] }, TermSplit { v: vec![], w: vec![], y: vec![0] }];
    assert!(cancel(&x, &bad).is_err());
}

#[test]
fn cancel_and_split_preserve_homology() {
    for prime in [5, 7] {
        let r = ground(prime);
        let mut rng = seeded(100 + prime as u64);
        for _ in 0..40 {
            let x = ground_complex(&r, -2, 4, 3, &[0, 2], &mut rng).unwrap();
            let splits = unit_splits(&x).unwrap();
            let c = cancel(&x, &splits).unwrap();
            assert_same_homology(&x, &c.small, &[0, 2]);
            let s = split_contraction(&x).unwrap();
            for p in x.positions() {
                for d in [0, 2] {
                    let small = s.small.term(p).unwrap();
                    assert_eq!(of_degree(&small, d).len(), oracle_homology(&x, p, d));
                }
            }
        }
    }
}

#[test]
fn minimize_recovers_koszul_complex() {
    let k = Fp::new(32003).unwrap();
    let s = Ring::symmetric(k, 1);
    let gens = FreeModule::new(&s, vec![0]);
    let kk = ModulePresentation::from_columns(&gens, vec![vec![s.var(0)], vec![s.var(1)]]).unwrap();
    let koszul = resolve(&kk).unwrap();
    // add a trivial pair S(-1) →1 S(-1) at positions -1, 0
    let e = FreeModule::new(&s, vec![1]);
    let pair = FreeComplex::new(&s, -1, vec![e.clone(), e.clone()], vec![GradedMatrix::identity(&e)], true).unwrap();
    let x = koszul.direct_sum(&pair).unwrap();
    assert!(!x.is_minimal());
    let c = minimize(&x).unwrap();
    assert!(c.small.is_minimal());
    let ranks: Vec<usize> = c.small.terms().iter().map(|t| t.rank()).collect();
    assert_eq!(ranks, vec![1, 2, 1]);
}

/// dim H^p of (U, d̂) with U = ker f̂, computed from a kernel basis and the oracle rank.
fn kernel_complex_homology(c: &Contraction<Fp>, p: i64) -> usize {
    let prime = c.big.field().prime() as u64;
    let basis = |q: i64| -> DenseMatrix<Fp> { c.f.at(q).unwrap().scalar_part().kernel_basis() };
    let image_rank = |q: i64| -> usize {
        if q < c.big.lo() || q >= c.big.hi() {
            return 0;
        }
        let k = basis(q);
        let img = c.big.diff(q).unwrap().scalar_part().dot(&k);
        let rows = (0..img.rows()).map(|i| (0..img.cols()).map(|j| *img.get(i, j) as u64).collect()).collect();
        rank_mod(rows, prime)
    };
    basis(p).cols() - image_rank(p) - image_rank(p - 1)
}

#[test]
fn bpl_filtered_perturbations() {
    for prime in [5, 7] {
        let r = ground(prime);
        let mut rng = seeded(200 + prime as u64);
        for _ in 0..40 {
            let (c, pert) = filtered_perturbation(&r, 0, 4, 3, 2, &mut rng).unwrap();
            let out = bpl(&c, &pert, 3).unwrap();
            assert_eq!(out.check_identities(), Ok(()));
            assert_same_homology(&out.big, &out.small, &[0]);
            for p in out.small.lo()..out.small.hi() - 1 {
                let d2 = out.small.diff(p).unwrap().then(&out.small.diff(p + 1).unwrap()).unwrap();
                assert!(d2.is_zero());
            }
            for p in out.big.positions() {
                let u = out.f.at(p).unwrap().scalar_part().kernel_basis().cols();
                assert_eq!(out.big.term(p).unwrap().rank(), out.small.term(p).unwrap().rank() + u);
                assert_eq!(kernel_complex_homology(&out, p), 0);
            }
        }
    }
}

#[test]
fn bpl_trivial_cases() {
    let r = ground(5);
    let mut rng = seeded(7);
    let x = ground_complex(&r, 0, 3, 3, &[0], &mut rng).unwrap();
    let c = split_contraction(&x).unwrap();
    let out = bpl(&c, &Operator::differential(&x).sub(&Operator::differential(&x)).unwrap(), 2).unwrap();
    assert_eq!(out.f, c.f);
    assert_eq!(out.g, c.g);
    assert_eq!(out.h, c.h);
    // [F_5 →1 F_5] perturbed by d' = 1 gives d̂ = 2, still contractible onto 0
    let one = FreeModule::new(&r, vec![0]);
    let x = FreeComplex::new(&r, 0, vec![one.clone(), one.clone()], vec![GradedMatrix::identity(&one)], true).unwrap();
    let c = split_contraction(&x).unwrap();
    let pert = Operator::differential(&x);
    // h d' = 1 is not nilpotent, but id + h d' = 2 is invertible in F_5
    let out = bpl(&c, &pert, 4).unwrap();
    assert!(out.small.terms().iter().all(|t| t.is_zero()));
    assert_eq!(out.big.diff(0).unwrap().entry(0, 0).constant(), Some(&2));
    // with d' = -1 the operator id + h d' vanishes
    let minus = pert.neg();
    let err = bpl(&c, &minus, 4).unwrap_err();
    assert!(matches!(err, koszul::Error::NotNilpotent { .. }), "{err}");
}
