use std::cell::Cell;
use std::collections::BTreeMap;
use std::fmt;

use koszul::exactlin::{Field, Fp};
use koszul::homalg::{FreeComplex, FreeModule, GradedMatrix, ModulePresentation};
use koszul::rings::{Monomial, Ring, RingElem};
use serde::{Deserialize, Serialize};

/// A rejected input document. `line` and `column` are 1-based; 0 means no position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl InputError {
    pub fn new(message: impl Into<String>) -> Self {
        InputError { line: 0, column: 0, message: message.into() }
    }

    fn from_json(e: serde_json::Error) -> Self {
        InputError { line: e.line(), column: e.column(), message: strip_position(&e.to_string()) }
    }
}

fn strip_position(s: &str) -> String {
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s.to_string(),
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
        } else {
            write!(f, "{}", self.message)
        }
    }
}

impl std::error::Error for InputError {}

/// The symmetric algebra S or the exterior algebra Λ on n+1 variables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algebra {
    #[default]
    #[serde(rename = "S")]
    Symmetric,
    #[serde(rename = "E")]
    Exterior,
}

impl Algebra {
    fn is_default(&self) -> bool {
        *self == Algebra::Symmetric
    }

    pub fn ring(self, k: Fp, n: usize) -> Ring<Fp> {
        match self {
            Algebra::Symmetric => Ring::symmetric(k, n),
            Algebra::Exterior => Ring::exterior(k, n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    /// projective dimension; the rings have n+1 variables
    #[serde(deserialize_with = "positive")]
    pub n: usize,
    /// characteristic of the ground field F_p
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "prime")]
    pub field: Option<u32>,
}

fn positive<'de, D: serde::Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
    let n = usize::deserialize(d)?;
    if n == 0 {
        return Err(serde::de::Error::custom("n must be at least 1"));
    }
    Ok(n)
}

fn prime<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<u32>, D::Error> {
    let p = u32::deserialize(d)?;
    if Fp::new(p).is_none() {
        return Err(serde::de::Error::custom(format!("field {p} is not a prime below 2^31")));
    }
    Ok(Some(p))
}

/// A rational coefficient num/den, reduced into F_p when the ring is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CoeffRepr", into = "CoeffRepr")]
pub struct Coeff {
    pub num: i64,
    pub den: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffRepr {
    Int(i64),
    Text(String),
}

impl TryFrom<CoeffRepr> for Coeff {
    type Error = String;

    fn try_from(r: CoeffRepr) -> Result<Self, String> {
        let c = match r {
            CoeffRepr::Int(num) => Coeff { num, den: 1 },
            CoeffRepr::Text(s) => {
                let bad = || format!("malformed coefficient {s:?}");
                let (a, b) = s.split_once('/').unwrap_or((&s, "1"));
                let num = a.trim().parse::<i64>().map_err(|_| bad())?;
                let den = b.trim().parse::<i64>().map_err(|_| bad())?;
                Coeff { num, den }
            }
        };
        if c.den == 0 {
            return Err("zero denominator".into());
        }
        if let Some(p) = context().and_then(|c| c.1) {
            if c.den.rem_euclid(p as i64) == 0 {
                return Err(format!("denominator {} is not invertible in F_{p}", c.den));
            }
        }
        Ok(c)
    }
}

impl From<Coeff> for CoeffRepr {
    fn from(c: Coeff) -> Self {
        if c.den == 1 {
            CoeffRepr::Int(c.num)
        } else {
            CoeffRepr::Text(format!("{}/{}", c.num, c.den))
        }
    }
}

impl Coeff {
    pub fn to_field(self, k: &Fp) -> Result<u32, String> {
        let den = k.inv(&k.from_i64(self.den)).ok_or_else(|| format!("denominator {} is not invertible in F_{}", self.den, k.prime()))?;
        Ok(k.mul(&k.from_i64(self.num), &den))
    }

    /// The representative of c in (-p/2, p/2].
    pub fn balanced(c: u32, k: &Fp) -> Self {
        let p = k.prime() as i64;
        let c = c as i64;
        Coeff { num: if c > p / 2 { c - p } else { c }, den: 1 }
    }
}

/// A term `[exponent vector, coefficient]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "(Vec<u16>, Coeff)", into = "(Vec<u16>, Coeff)")]
pub struct Term {
    pub exps: Vec<u16>,
    pub coeff: Coeff,
}

impl TryFrom<(Vec<u16>, Coeff)> for Term {
    type Error = String;

    fn try_from((exps, coeff): (Vec<u16>, Coeff)) -> Result<Self, String> {
        if let Some((n, _)) = context() {
            if exps.len() != n + 1 {
                return Err(format!("exponent vector {exps:?} has length {}, expected {}", exps.len(), n + 1));
            }
        }
        Ok(Term { exps, coeff })
    }
}

impl From<Term> for (Vec<u16>, Coeff) {
    fn from(t: Term) -> Self {
        (t.exps, t.coeff)
    }
}

/// A homogeneous polynomial as a list of terms.
pub type Poly = Vec<Term>;

fn poly_degree(p: &Poly, algebra: Algebra) -> Result<Option<i64>, String> {
    let mut deg = None;
    for t in p {
        if algebra == Algebra::Exterior && t.exps.iter().any(|&e| e > 1) {
            return Err(format!("exterior monomial {:?} has an exponent above 1", t.exps));
        }
        let d = t.exps.iter().map(|&e| e as i64).sum::<i64>();
        match deg {
            None => deg = Some(d),
            Some(d0) if d0 != d => return Err(format!("polynomial mixes degrees {d0} and {d}")),
            _ => {}
        }
    }
    Ok(deg)
}

/// Degree of the source generator of a column with the given target generators.
fn column_degree(col: &[Poly], targets: &[i64], algebra: Algebra, what: &str) -> Result<Option<i64>, String> {
    if col.len() != targets.len() {
        return Err(format!("{what} has {} entries, expected {}", col.len(), targets.len()));
    }
    let mut deg = None;
    for (p, g) in col.iter().zip(targets) {
        if let Some(e) = poly_degree(p, algebra)? {
            let d = g + e;
            match deg {
                None => deg = Some(d),
                Some(d0) if d0 != d => return Err(format!("{what} is not homogeneous: degrees {d0} and {d}")),
                _ => {}
            }
        }
    }
    Ok(deg)
}

/// A module presentation: generator degrees and relations, one column per relation,
/// each column listing one polynomial per generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawModule")]
pub struct ModuleSpec {
    #[serde(default, skip_serializing_if = "Algebra::is_default")]
    pub ring: Algebra,
    pub gens: Vec<i64>,
    #[serde(default)]
    pub relations: Vec<Vec<Poly>>,
    /// relation degrees; required only for zero columns
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModule {
    #[serde(default)]
    ring: Algebra,
    gens: Vec<i64>,
    #[serde(default)]
    relations: Vec<Vec<Poly>>,
    #[serde(default)]
    degrees: Option<Vec<i64>>,
}

impl TryFrom<RawModule> for ModuleSpec {
    type Error = String;

    fn try_from(r: RawModule) -> Result<Self, String> {
        let m = ModuleSpec { ring: r.ring, gens: r.gens, relations: r.relations, degrees: r.degrees };
        m.relation_degrees()?;
        Ok(m)
    }
}

impl ModuleSpec {
    /// Degrees of the relation generators, checked against `degrees` when given.
    pub fn relation_degrees(&self) -> Result<Vec<i64>, String> {
        if let Some(d) = &self.degrees {
            if d.len() != self.relations.len() {
                return Err(format!("{} relation degrees for {} relations", d.len(), self.relations.len()));
            }
        }
        let mut out = Vec::new();
        for (j, col) in self.relations.iter().enumerate() {
            let what = format!("relation {j}");
            let inferred = column_degree(col, &self.gens, self.ring, &what)?;
            let given = self.degrees.as_ref().map(|d| d[j]);
            out.push(match (inferred, given) {
                (Some(a), Some(b)) if a != b => return Err(format!("{what} has degree {a}, declared {b}")),
                (Some(a), _) | (None, Some(a)) => a,
                (None, None) => return Err(format!("{what} is zero; declare its degree in \"degrees\"")),
            });
        }
        Ok(out)
    }

    pub fn build(&self, k: Fp, n: usize) -> Result<ModulePresentation<Fp>, String> {
        let ring = self.ring.ring(k, n);
        let gens = FreeModule::new(&ring, self.gens.clone());
        let rels = FreeModule::new(&ring, self.relation_degrees()?);
        let m = matrix(&ring, &rels, &gens, &self.relations)?;
        Ok(ModulePresentation::new(m))
    }

    pub fn from_presentation(m: &ModulePresentation<Fp>) -> Self {
        let r = m.relations();
        ModuleSpec {
            ring: algebra_of(m.ring()),
            gens: m.gens().gens().to_vec(),
            relations: columns(r),
            degrees: Some(r.source().gens().to_vec()).filter(|_| (0..r.cols()).any(|j| (0..r.rows()).all(|i| r.entry(i, j).is_zero()))),
        }
    }
}

/// A bounded complex of free modules: generator degrees per position starting at `lo`,
/// and for each differential the columns of its matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawComplex")]
pub struct ComplexSpec {
    #[serde(default, skip_serializing_if = "Algebra::is_default")]
    pub ring: Algebra,
    pub lo: i64,
    pub terms: Vec<Vec<i64>>,
    #[serde(default)]
    pub diffs: Vec<Vec<Vec<Poly>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComplex {
    #[serde(default)]
    ring: Algebra,
    lo: i64,
    terms: Vec<Vec<i64>>,
    #[serde(default)]
    diffs: Vec<Vec<Vec<Poly>>>,
}

impl TryFrom<RawComplex> for ComplexSpec {
    type Error = String;

    fn try_from(r: RawComplex) -> Result<Self, String> {
        let c = ComplexSpec { ring: r.ring, lo: r.lo, terms: r.terms, diffs: r.diffs };
        c.check()?;
        Ok(c)
    }
}

impl ComplexSpec {
    fn check(&self) -> Result<(), String> {
        if self.terms.is_empty() {
            return Err("a complex needs at least one term".into());
        }
        if self.diffs.len() != self.terms.len() - 1 {
            return Err(format!("{} terms need {} differentials, got {}", self.terms.len(), self.terms.len() - 1, self.diffs.len()));
        }
        for (k, d) in self.diffs.iter().enumerate() {
            let p = self.lo + k as i64;
            if d.len() != self.terms[k].len() {
                return Err(format!("differential at position {p} has {} columns, expected {}", d.len(), self.terms[k].len()));
            }
            for (j, col) in d.iter().enumerate() {
                let what = format!("column {j} of the differential at position {p}");
                if let Some(g) = column_degree(col, &self.terms[k + 1], self.ring, &what)? {
                    if g != self.terms[k][j] {
                        return Err(format!("{what} has degree {g}, but its source generator has degree {}", self.terms[k][j]));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn build(&self, k: Fp, n: usize) -> Result<FreeComplex<Fp>, String> {
        let ring = self.ring.ring(k, n);
        let terms: Vec<FreeModule<Fp>> = self.terms.iter().map(|g| FreeModule::new(&ring, g.clone())).collect();
        let diffs = self
            .diffs
            .iter()
            .enumerate()
            .map(|(i, cols)| matrix(&ring, &terms[i], &terms[i + 1], cols))
            .collect::<Result<Vec<_>, _>>()?;
        FreeComplex::new(&ring, self.lo, terms, diffs, true).map_err(|e| e.to_string())
    }

    pub fn from_complex(c: &FreeComplex<Fp>) -> Self {
        ComplexSpec {
            ring: algebra_of(c.ring()),
            lo: c.lo(),
            terms: c.terms().iter().map(|t| t.gens().to_vec()).collect(),
            diffs: c.diffs().iter().map(columns).collect(),
        }
    }
}

fn algebra_of(r: &Ring<Fp>) -> Algebra {
    match r.kind() {
        koszul::rings::RingKind::Exterior => Algebra::Exterior,
        _ => Algebra::Symmetric,
    }
}

fn matrix(ring: &Ring<Fp>, src: &FreeModule<Fp>, tgt: &FreeModule<Fp>, cols: &[Vec<Poly>]) -> Result<GradedMatrix<Fp>, String> {
    let k = ring.field();
    let mut entries = vec![RingElem::zero(); src.rank() * tgt.rank()];
    for (j, col) in cols.iter().enumerate() {
        for (i, poly) in col.iter().enumerate() {
            let terms = poly
                .iter()
                .map(|t| {
                    if t.exps.len() != ring.nvars() {
                        return Err(format!("exponent vector {:?} has length {}, expected {}", t.exps, t.exps.len(), ring.nvars()));
                    }
                    Ok((Monomial(t.exps.clone()), t.coeff.to_field(k)?))
                })
                .collect::<Result<Vec<_>, String>>()?;
            entries[i * src.rank() + j] = ring.from_terms(terms).map_err(|e| e.to_string())?;
        }
    }
    GradedMatrix::new(src, tgt, entries).map_err(|e| e.to_string())
}

fn columns(m: &GradedMatrix<Fp>) -> Vec<Vec<Poly>> {
    let k = m.ring().field();
    (0..m.cols())
        .map(|j| {
            (0..m.rows())
                .map(|i| m.entry(i, j).terms().iter().map(|(mono, c)| Term { exps: mono.0.clone(), coeff: Coeff::balanced(*c, k) }).collect())
                .collect()
        })
        .collect()
}

/// A ring, named modules and named complexes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub ring: RingSpec,
    #[serde(default)]
    pub modules: BTreeMap<String, ModuleSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub complexes: BTreeMap<String, ComplexSpec>,
}

type Context = Option<(usize, Option<u32>)>;

thread_local! {
    static CONTEXT: Cell<Context> = const { Cell::new(None) };
}

fn context() -> Context {
    CONTEXT.with(|c| c.get())
}

struct ContextGuard(Context);

impl ContextGuard {
    fn set(c: Context) -> Self {
        ContextGuard(CONTEXT.with(|x| x.replace(c)))
    }
}

impl Drop for ContextGuard {
    fn drop(&mut self) {
        CONTEXT.with(|x| x.set(self.0));
    }
}

/// Parses and validates a document. Errors carry the line and column where they were detected.
pub fn parse_input(text: &str) -> Result<InputDocument, InputError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(InputError::from_json)?;
    let ring = value.get("ring");
    let n = ring.and_then(|r| r.get("n")).and_then(|v| v.as_u64()).map(|n| n as usize);
    let p = ring.and_then(|r| r.get("field")).and_then(|v| v.as_u64()).and_then(|p| u32::try_from(p).ok()).filter(|&p| Fp::new(p).is_some());
    let _guard = ContextGuard::set(n.map(|n| (n, p)));
    serde_json::from_str(text).map_err(InputError::from_json)
}

impl InputDocument {
    /// The ground field: the override if given, else the document's field, else `default`.
    pub fn field(&self, prime_override: Option<u32>, default: u32) -> Result<Fp, InputError> {
        let p = prime_override.or(self.ring.field).unwrap_or(default);
        Fp::new(p).ok_or_else(|| InputError::new(format!("{p} is not a prime below 2^31")))
    }

    pub fn module(&self, name: &str, k: Fp) -> Result<ModulePresentation<Fp>, InputError> {
        let spec = self.modules.get(name).ok_or_else(|| InputError::new(format!("no module named {name:?}")))?;
        spec.build(k, self.ring.n).map_err(|e| InputError::new(format!("module {name:?}: {e}")))
    }

    pub fn complex(&self, name: &str, k: Fp) -> Result<FreeComplex<Fp>, InputError> {
        let spec = self.complexes.get(name).ok_or_else(|| InputError::new(format!("no complex named {name:?}")))?;
        spec.build(k, self.ring.n).map_err(|e| InputError::new(format!("complex {name:?}: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }
}
