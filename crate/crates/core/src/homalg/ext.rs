use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::complex::FreeComplex;
use super::presentation::{complex_homology, resolve, ModulePresentation};
use crate::error::Result;
use crate::exactlin::Field;

/// Hom(L•, ω_S) for a resolution L•, with ω_S = S(-n-1); position i computes Ext^i.
pub fn dual_resolution<K: Field>(res: &FreeComplex<K>) -> Result<FreeComplex<K>> {
    let n = res.ring().n() as i64;
    Ok(res.dual()?.twist(-n - 1))
}

/// Ext^i_S(M, ω_S) for i = 0..=n+1, computed from a minimal resolution.
#[derive(Clone, Debug)]
pub struct ExtModules<K: Field> {
    pub resolution: FreeComplex<K>,
    /// Hom(L•, ω_S), positions 0..=len.
    pub cocomplex: FreeComplex<K>,
}

impl<K: Field> ExtModules<K> {
    pub fn new(m: &ModulePresentation<K>) -> Result<Self> {
        let resolution = resolve(m)?;
        let cocomplex = dual_resolution(&resolution)?;
        Ok(ExtModules { resolution, cocomplex })
    }

    pub fn n(&self) -> usize {
        self.resolution.ring().n()
    }

    /// dim Ext^i(M, ω_S)_d.
    pub fn dim(&self, i: i64, d: i64) -> Result<usize> {
        if i < 0 || i > self.n() as i64 + 1 {
            return Ok(0);
        }
        self.cocomplex.homology_dim(i, d)
    }

    pub fn presentation(&self, i: i64) -> Result<ModulePresentation<K>> {
        complex_homology(&self.cocomplex, i)
    }

    /// dim Ext^i over a degree range, as a map degree → dim (zeros included).
    pub fn table(&self, i: i64, lo: i64, hi: i64) -> Result<BTreeMap<i64, usize>> {
        (lo..=hi).map(|d| Ok((d, self.dim(i, d)?))).collect()
    }
}

/// Laurent polynomial with integer coefficients, exponent → coefficient.
pub type Laurent = BTreeMap<i64, i64>;

/// Hilbert series N(t)/(1-t)^{n+1}, Krull dimension and Hilbert polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HilbertData {
    pub n: usize,
    /// numerator over (1-t)^{n+1}
    pub numerator: Laurent,
    /// numerator over (1-t)^{krull_dim} after cancelling common factors
    pub reduced_numerator: Laurent,
    /// -1 for the zero module
    pub krull_dim: i64,
    /// coefficients c_0, c_1, ... of the Hilbert polynomial in d, as reduced fractions
    pub hilbert_polynomial: Vec<String>,
    #[serde(skip)]
    poly: Vec<BigRational>,
}

impl HilbertData {
    pub fn from_resolution<K: Field>(res: &FreeComplex<K>) -> Self {
        let n = res.ring().n();
        let mut num = Laurent::new();
        for p in res.positions() {
            let sign = if p.rem_euclid(2) == 0 { 1 } else { -1 };
            for g in res.term(p).unwrap().gens() {
                *num.entry(*g).or_default() += sign;
            }
        }
        num.retain(|_, c| *c != 0);
        Self::from_numerator(n, num)
    }

    pub fn of<K: Field>(m: &ModulePresentation<K>) -> Result<Self> {
        Ok(Self::from_resolution(&resolve(m)?))
    }

    pub fn from_numerator(n: usize, num: Laurent) -> Self {
        let mut red = num.clone();
        let mut order = 0;
        if !red.is_empty() {
            while red.values().sum::<i64>() == 0 && order <= n + 1 {
                red = divide_one_minus_t(&red);
                order += 1;
            }
        }
        let krull_dim = if num.is_empty() { -1 } else { (n + 1 - order) as i64 };
        let poly = if krull_dim <= 0 { Vec::new() } else { hilbert_poly(&red, krull_dim as usize) };
        let hilbert_polynomial = poly.iter().map(fmt_rat).collect();
        HilbertData { n, numerator: num, reduced_numerator: red, krull_dim, hilbert_polynomial, poly }
    }

    /// Value of the Hilbert polynomial at d.
    pub fn poly_eval(&self, d: i64) -> BigRational {
        let x = BigRational::from_integer(BigInt::from(d));
        let mut acc = BigRational::zero();
        for c in self.poly.iter().rev() {
            acc = acc * &x + c;
        }
        acc
    }

    pub fn poly_coeffs(&self) -> &[BigRational] {
        &self.poly
    }

    /// Value of the Hilbert function at d from the series expansion.
    pub fn series_coeff(&self, d: i64) -> i64 {
        // coefficient of t^d in N(t)/(1-t)^{n+1}
        let k = self.n as i64;
        self.numerator
            .iter()
            .map(|(e, c)| {
                let m = d - e;
                if m < 0 {
                    0
                } else {
                    c * crate::rings::binomial((m + k) as usize, k as usize) as i64
                }
            })
            .sum()
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact division by (1 - t) of a Laurent polynomial with value 0 at t = 1.
fn divide_one_minus_t(p: &Laurent) -> Laurent {
    // p = (1-t) q  ⇒  q_k = Σ_{j ≤ k} p_j
    let mut q = Laurent::new();
    let mut acc = 0;
    let lo = *p.keys().next().unwrap();
    let hi = *p.keys().last().unwrap();
    for k in lo..hi {
        acc += p.get(&k).copied().unwrap_or(0);
        if acc != 0 {
            q.insert(k, acc);
        }
    }
    q
}

/// Polynomial P with P(d) = Σ_j q_j C(d - j + r - 1, r - 1) for large d.
fn hilbert_poly(q: &Laurent, r: usize) -> Vec<BigRational> {
    // interpolate through r points far to the right of the numerator support
    let start = q.keys().last().copied().unwrap_or(0) + 1;
    let xs: Vec<i64> = (0..r as i64).map(|k| start + k).collect();
    let ys: Vec<BigRational> = xs
        .iter()
        .map(|&d| {
            let v: i64 = q
                .iter()
                .map(|(j, c)| c * crate::rings::binomial((d - j) as usize + r - 1, r - 1) as i64)
                .sum();
            BigRational::from_integer(BigInt::from(v))
        })
        .collect();
    lagrange(&xs, &ys)
}

fn lagrange(xs: &[i64], ys: &[BigRational]) -> Vec<BigRational> {
    let n = xs.len();
    let mut out = vec![BigRational::zero(); n];
    for i in 0..n {
        let mut basis = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for j in 0..n {
            if i == j {
                continue;
            }
            let xj = BigRational::from_integer(BigInt::from(xs[j]));
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (k, b) in basis.iter().enumerate() {
                next[k + 1] += b;
                next[k] -= b * &xj;
            }
            basis = next;
            denom *= BigRational::from_integer(BigInt::from(xs[i] - xs[j]));
        }
        for (k, b) in basis.iter().enumerate() {
            out[k] += b * &ys[i] / &denom;
        }
    }
    while out.last().is_some_and(|c| c.is_zero()) {
        out.pop();
    }
    out
}
