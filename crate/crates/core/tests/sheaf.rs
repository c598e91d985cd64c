use koszul::exactlin::Fp;
use koszul::homalg::{kernel_generators, resolve, FreeComplex, FreeModule, HilbertData, ModulePresentation};
use koszul::random::{free_s_module, s_presentation, seeded};
use koszul::rings::{Ring, RingElem};
use koszul::sheaf::*;
use num_traits::ToPrimitive;

fn k() -> Fp {
    Fp::new(32003).unwrap()
}

fn s(n: usize) -> Ring<Fp> {
    Ring::symmetric(k(), n)
}

/// Number of monomials of degree d in `vars` variables, by enumeration.
fn monomials(vars: usize, d: i64) -> usize {
    if d < 0 {
        return 0;
    }
    if vars == 1 {
        return 1;
    }
    (0..=d).map(|e| monomials(vars - 1, d - e)).sum()
}

fn free(n: usize, gens: Vec<i64>) -> ModulePresentation<Fp> {
    ModulePresentation::free(&FreeModule::new(&s(n), gens))
}

fn quotient(n: usize, gens: Vec<i64>, cols: Vec<Vec<RingElem<Fp>>>) -> ModulePresentation<Fp> {
    ModulePresentation::from_columns(&FreeModule::new(&s(n), gens), cols).unwrap()
}

fn residue(n: usize) -> ModulePresentation<Fp> {
    let r = s(n);
    quotient(n, vec![0], (0..=n).map(|i| vec![r.var(i)]).collect())
}

/// Tangent bundle of P²: Coker(S → S(1)³).
fn tangent() -> ModulePresentation<Fp> {
    let r = s(2);
    quotient(2, vec![-1, -1, -1], vec![(0..3).map(|i| r.var(i)).collect()])
}

/// Cotangent bundle of P²: the kernel of S(-1)³ → S, presented as Coker(S(-3) → S(-2)³).
fn cotangent() -> ModulePresentation<Fp> {
    let r = s(2);
    quotient(2, vec![2, 2, 2], vec![(0..3).map(|i| r.var(i)).collect()])
}

#[test]
fn structure_sheaf_of_the_plane() {
    let t = cohomology_table(&free(2, vec![0]), -5, 5).unwrap();
    for d in -5..=5 {
        assert_eq!(t.get(0, d), Some(monomials(3, d)), "h0 at {d}");
        assert_eq!(t.get(1, d), Some(0));
        // Serre duality against the monomial count of h^0(O(-d-3))
        assert_eq!(t.get(2, d), Some(monomials(3, -d - 3)), "h2 at {d}");
    }
    let text = t.to_text();
    assert!(text.starts_with("h^2"));
    assert!(text.lines().last().unwrap().starts_with("d"));
    let json = serde_json::to_string(&t).unwrap();
    assert_eq!(serde_json::from_str::<CohomologyTable>(&json).unwrap(), t);
}

#[test]
fn lines_and_points_of_projective_space() {
    for n in 1..=3 {
        let t = cohomology_table(&free(n, vec![0]), -6, 4).unwrap();
        for d in -6..=4 {
            assert_eq!(t.get(0, d), Some(monomials(n + 1, d)));
            assert_eq!(t.get(n, d), Some(monomials(n + 1, -d - n as i64 - 1)));
            for i in 1..n {
                assert_eq!(t.get(i, d), Some(0));
            }
        }
    }
}

#[test]
fn finite_length_modules_have_zero_sheaf() {
    for n in 1..=3 {
        assert!(cohomology_table(&residue(n), -4, 4).unwrap().is_zero());
    }
    let r = s(2);
    let m = quotient(2, vec![0], vec![vec![r.mul(&r.var(0), &r.var(0))], vec![r.var(1)], vec![r.var(2)]]);
    assert!(cohomology_table(&m, -4, 4).unwrap().is_zero());
}

#[test]
fn tangent_bundle_has_one_intermediate_class() {
    let t = cohomology_table(&tangent(), -6, 3).unwrap();
    let row1: Vec<i64> = (-6..=3).filter(|&d| t.get(1, d) != Some(0)).collect();
    assert_eq!(row1, vec![-3]);
    assert_eq!(t.get(1, -3), Some(1));
    // Bott: h^1(Ω(d)) = 1 exactly at d = 0
    let t = cohomology_table(&cotangent(), -4, 4).unwrap();
    for d in -4..=4 {
        assert_eq!(t.get(1, d), Some(usize::from(d == 0)), "h1(Ω({d}))");
    }
}

fn euler_matches_hilbert_polynomial(m: &ModulePresentation<Fp>, lo: i64, hi: i64) {
    let t = cohomology_table(m, lo, hi).unwrap();
    let hd = HilbertData::of(m).unwrap();
    for d in lo..=hi {
        let chi: i64 = (0..=t.n).map(|i| (if i % 2 == 0 { 1 } else { -1 }) * t.get(i, d).unwrap() as i64).sum();
        let p = if hd.krull_dim <= 0 { 0 } else { hd.poly_eval(d).to_integer().to_i64().unwrap() };
        assert_eq!(chi, p, "degree {d}");
    }
}

#[test]
fn euler_characteristic_is_the_hilbert_polynomial() {
    let r = s(2);
    let fixtures = vec![
        free(2, vec![0]),
        free(2, vec![1, -2]),
        tangent(),
        cotangent(),
        residue(2),
        quotient(2, vec![0], vec![vec![r.var(0)]]),
        quotient(2, vec![0], vec![vec![r.var(0)], vec![r.var(1)]]),
        quotient(2, vec![0], vec![vec![r.mul(&r.var(0), &r.var(0))], vec![r.mul(&r.var(0), &r.var(1))]]),
    ];
    for m in &fixtures {
        euler_matches_hilbert_polynomial(m, -5, 5);
    }
    let mut rng = seeded(11);
    for n in 1..=3 {
        for _ in 0..6 {
            let m = s_presentation(&s(n), &mut rng).unwrap();
            euler_matches_hilbert_polynomial(&m, -4, 4);
        }
    }
}

#[test]
fn saturated_modules_agree_with_global_sections() {
    let r = s(2);
    for m in [free(2, vec![0, 2]), quotient(2, vec![0], vec![vec![r.var(0)]]), tangent()] {
        let t = cohomology_table(&m, -3, 6).unwrap();
        for d in 0..=6 {
            assert_eq!(t.get(0, d), Some(m.dim(d)));
        }
    }
}

#[test]
fn splitting_criterion() {
    assert_eq!(horrocks_split_check(&free(2, vec![1, -2])).unwrap(), SplitVerdict::Splits(vec![-1, 2]));
    assert_eq!(
        horrocks_split_check(&free(2, vec![1, -2])).unwrap().to_text(),
        "splits: O(-1) ⊕ O(2)"
    );
    let mut rng = seeded(5);
    for n in 2..=3 {
        for _ in 0..5 {
            let f = free_s_module(&s(n), 4, &mut rng);
            let mut want: Vec<i64> = f.gens().iter().map(|g| -g).collect();
            want.sort();
            assert_eq!(horrocks_split_check(&ModulePresentation::free(&f)).unwrap(), SplitVerdict::Splits(want));
        }
    }
    assert_eq!(
        horrocks_split_check(&cotangent()).unwrap(),
        SplitVerdict::DoesNotSplit { i: 1, d: 0, h: 1 }
    );
    assert_eq!(
        horrocks_split_check(&tangent()).unwrap(),
        SplitVerdict::DoesNotSplit { i: 1, d: -3, h: 1 }
    );
    // the maximal ideal needs saturating: it sheafifies to O
    let maximal = ModulePresentation::new(kernel_generators(residue(2).relations()).unwrap());
    assert_eq!(horrocks_split_check(&maximal).unwrap(), SplitVerdict::Splits(vec![0]));
    assert_eq!(horrocks_split_check(&residue(2)).unwrap(), SplitVerdict::Splits(vec![]));
    assert!(horrocks_split_check(&free(1, vec![0])).is_err());
}

fn koszul_of_residue(n: usize) -> FreeComplex<Fp> {
    resolve(&residue(n)).unwrap()
}

#[test]
fn horrocks_conditions() {
    let z = FreeComplex::new(&s(2), 0, vec![FreeModule::zero(&s(2))], vec![], true).unwrap();
    assert!(is_horrocks_complex(&z).unwrap().is_horrocks());
    let shifted = koszul_of_residue(2).translate(2);
    let rep = is_horrocks_complex(&shifted).unwrap();
    assert_eq!(rep.conditions, [false, false, false]);
    assert_eq!(rep.krull[&-2], 0);
}

#[test]
fn horrocks_resolutions_are_horrocks_complexes() {
    let r = s(2);
    let mut fixtures = vec![
        free(2, vec![-3]),
        residue(2),
        tangent(),
        cotangent(),
        quotient(2, vec![0], vec![vec![r.var(0)]]),
        free(1, vec![0, 1]),
        residue(3),
    ];
    let mut rng = seeded(3);
    for n in 1..=3 {
        for _ in 0..4 {
            fixtures.push(s_presentation(&s(n), &mut rng).unwrap());
        }
    }
    for m in &fixtures {
        let k = horrocks_resolution(m).unwrap();
        let rep = is_horrocks_complex(&k).unwrap();
        assert!(rep.is_horrocks(), "{:?}", rep.krull_dual);
        // twists and translations keep the three conditions in agreement
        for a in [-2, 1] {
            is_horrocks_complex(&k.twist(a)).unwrap();
        }
        is_horrocks_complex(&k.translate(1)).unwrap();
    }
    let k = horrocks_resolution(&free(2, vec![-3])).unwrap();
    assert_eq!(k.term(-1).unwrap().gens(), &[-3]);
}

#[test]
fn horrocks_resolution_of_the_tangent_bundle() {
    // T^{n-i+1} of the dual Koszul complex for n = 2, i = 1
    let q = koszul_of_residue(2);
    let want = q.dual().unwrap().translate(2).betti();
    let got = horrocks_resolution(&tangent()).unwrap();
    assert!(got.is_minimal());
    assert_eq!(got.trimmed().betti(), want);
}

#[test]
fn stabilization() {
    assert!(stabilize(&free(2, vec![0, 3])).unwrap().is_zero().unwrap());
    let k_plus = residue(2).direct_sum(&free(2, vec![-3])).unwrap();
    let st = stabilize(&k_plus).unwrap();
    assert_eq!(resolve(&st).unwrap().betti(), resolve(&residue(2)).unwrap().betti());
    let mut rng = seeded(8);
    for _ in 0..6 {
        let m = s_presentation(&s(2), &mut rng).unwrap();
        let a = free_s_module(&s(2), 2, &mut rng);
        let with = m.direct_sum(&ModulePresentation::free(&a)).unwrap();
        let (x, y) = (stabilize(&m).unwrap(), stabilize(&with).unwrap());
        assert_eq!(resolve(&x).unwrap().betti(), resolve(&y).unwrap().betti());
        // nothing free is left
        assert_eq!(resolve(&stabilize(&x).unwrap()).unwrap().betti(), resolve(&x).unwrap().betti());
    }
}
