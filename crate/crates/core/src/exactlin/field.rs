use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A field together with its runtime parameters (the prime, for F_p).
pub trait Field: Clone + Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + Debug + PartialEq + Send + Sync + 'static;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn characteristic(&self) -> u64;
    fn format(&self, a: &Self::Elem) -> String;
    fn parse(&self, s: &str) -> Option<Self::Elem>;
    fn name(&self) -> String;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn sign(&self, negative: bool) -> Self::Elem {
        if negative {
            self.neg(&self.one())
        } else {
            self.one()
        }
    }

    /// `(-1)^e`
    fn pow_neg_one(&self, e: i64) -> Self::Elem {
        self.sign(e.rem_euclid(2) == 1)
    }

    /// `acc + a*b`
    fn mul_add(&self, acc: &Self::Elem, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(acc, &self.mul(a, b))
    }
}

/// The prime field F_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp {
    p: u32,
}

impl Fp {
    pub const DEFAULT_PRIME: u32 = 32003;

    /// Returns `None` unless `p` is a prime below 2^31.
    pub fn new(p: u32) -> Option<Fp> {
        if !(2..1 << 31).contains(&p) || !is_prime(p) {
            None
        } else {
            Some(Fp { p })
        }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p as u64 {
        if (p as u64).is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field for Fp {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1 % self.p
    }
    fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let s = *a as u64 + *b as u64;
        (s % self.p as u64) as u32
    }
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        let s = *a as u64 + self.p as u64 - *b as u64;
        (s % self.p as u64) as u32
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p as u64) as u32
    }
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - *a
        }
    }
    fn inv(&self, a: &u32) -> Option<u32> {
        if *a == 0 {
            return None;
        }
        // extended Euclid
        let (mut r0, mut r1) = (self.p as i64, *a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Some(t0.rem_euclid(self.p as i64) as u32)
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn characteristic(&self) -> u64 {
        self.p as u64
    }
    fn format(&self, a: &u32) -> String {
        // symmetric representative reads better for signs
        if *a > self.p / 2 {
            format!("-{}", self.p - *a)
        } else {
            a.to_string()
        }
    }
    fn parse(&self, s: &str) -> Option<u32> {
        parse_rational_text(s).and_then(|(n, d)| {
            let p = BigInt::from(self.p);
            let n = ((n % &p) + &p) % &p;
            let d = ((d % &p) + &p) % &p;
            let d = d.to_u32()?;
            let inv = self.inv(&d)?;
            Some(self.mul(&n.to_u32()?, &inv))
        })
    }
    fn name(&self) -> String {
        format!("F_{}", self.p)
    }
}

/// The rational numbers with arbitrary precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn characteristic(&self) -> u64 {
        0
    }
    fn format(&self, a: &BigRational) -> String {
        if a.denom().is_one() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
    fn parse(&self, s: &str) -> Option<BigRational> {
        let (n, d) = parse_rational_text(s)?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    }
    fn name(&self) -> String {
        "QQ".to_string()
    }
}

fn parse_rational_text(s: &str) -> Option<(BigInt, BigInt)> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() || d.is_negative() && d.abs().is_zero() {
        return None;
    }
    Some((n, d))
}
