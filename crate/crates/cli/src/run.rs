use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use koszul::bgg::{f_module, g_module, minimalize_f, minimalize_g, ModuleComplex};
use koszul::exactlin::Fp;
use koszul::homalg::{regularity, resolve, BettiTable, ExtModules, FreeComplex, HilbertData, ModulePresentation};
use koszul::perturb::{minimize, FilteredMinimalComplex};
use koszul::rings::{GradedModule, RingKind};
use koszul::sheaf::{cohomology_table, horrocks_resolution, horrocks_split_check, is_horrocks_complex, CohomologyTable, SplitVerdict};
use koszul::tate::{em_sheaf, ht_complex, ht_conditions, strand_table, tate_window, HTComplex};
use serde::Serialize;
use serde_json::{json, Value};

use crate::input::{parse_input, ComplexSpec, InputDocument, InputError, ModuleSpec};

/// Environment variable holding the prime used when neither `--prime` nor the document names one.
pub const PRIME_ENV: &str = "KOSZUL_PRIME";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Resolve,
    Betti,
    Hilbert,
    Ext,
    CohomologyTable,
    SplitCheck,
    HorrocksResolution,
    BggF,
    BggG,
    Minimalize,
    Tate,
    Strands,
    Ht,
    EmFixture,
}

impl Command {
    pub const ALL: [Command; 14] = [
        Command::Resolve,
        Command::Betti,
        Command::Hilbert,
        Command::Ext,
        Command::CohomologyTable,
        Command::SplitCheck,
        Command::HorrocksResolution,
        Command::BggF,
        Command::BggG,
        Command::Minimalize,
        Command::Tate,
        Command::Strands,
        Command::Ht,
        Command::EmFixture,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Resolve => "resolve",
            Command::Betti => "betti",
            Command::Hilbert => "hilbert",
            Command::Ext => "ext",
            Command::CohomologyTable => "cohomology-table",
            Command::SplitCheck => "split-check",
            Command::HorrocksResolution => "horrocks-resolution",
            Command::BggF => "bgg-f",
            Command::BggG => "bgg-g",
            Command::Minimalize => "minimalize",
            Command::Tate => "tate",
            Command::Strands => "strands",
            Command::Ht => "ht",
            Command::EmFixture => "em-fixture",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
}

/// An inclusive window `lo..hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once("..").ok_or_else(|| format!("window {s:?} is not of the form lo..hi"))?;
        let lo = a.trim().parse().map_err(|_| format!("bad window start {a:?}"))?;
        let hi = b.trim().parse().map_err(|_| format!("bad window end {b:?}"))?;
        if lo > hi {
            return Err(format!("window {lo}..{hi} has lo > hi"));
        }
        Ok(Window { lo, hi })
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub input: PathBuf,
    pub module: Option<String>,
    pub complex: Option<String>,
    pub window: Option<Window>,
    /// cohomological index i for `em-fixture`
    pub index: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub prime: Option<u32>,
    pub verbose: bool,
}

impl RunConfig {
    pub fn new(command: Command, input: impl Into<PathBuf>) -> Self {
        RunConfig {
            command,
            input: input.into(),
            module: None,
            complex: None,
            window: None,
            index: None,
            format: Format::Table,
            out: None,
            prime: None,
            verbose: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunError {
    Input(String),
    Computation(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Computation(_) => 1,
            RunError::Input(_) => 2,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Input(m) => write!(f, "input error: {m}"),
            RunError::Computation(m) => write!(f, "computation error: {m}"),
        }
    }
}

impl From<InputError> for RunError {
    fn from(e: InputError) -> Self {
        RunError::Input(e.to_string())
    }
}

impl From<koszul::Error> for RunError {
    fn from(e: koszul::Error) -> Self {
        match e {
            koszul::Error::InvalidInput(_) => RunError::Input(e.to_string()),
            _ => RunError::Computation(e.to_string()),
        }
    }
}

/// A command result in both renderings, built from the same data.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub text: String,
    pub json: Value,
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.text.clone(),
            Format::Json => serde_json::to_string_pretty(&self.json).expect("outputs serialize") + "\n",
        }
    }
}

type Res<T> = Result<T, RunError>;

fn default_prime() -> Res<u32> {
    match std::env::var(PRIME_ENV) {
        Ok(s) => s.trim().parse().map_err(|_| RunError::Input(format!("{PRIME_ENV}={s:?} is not an integer"))),
        Err(_) => Ok(Fp::DEFAULT_PRIME),
    }
}

/// Reads the input file, runs the command and writes the rendering to `--out` or stdout.
/// Returns the process exit status.
pub fn run(cfg: &RunConfig) -> i32 {
    let start = Instant::now();
    let result = std::fs::read_to_string(&cfg.input)
        .map_err(|e| RunError::Input(format!("cannot read {}: {e}", cfg.input.display())))
        .and_then(|text| Ok(parse_input(&text)?))
        .and_then(|doc| execute(cfg, &doc));
    if cfg.verbose {
        eprintln!("{} finished in {:?}", cfg.command.name(), start.elapsed());
    }
    match result {
        Ok(out) => {
            let rendered = out.render(cfg.format);
            match &cfg.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, rendered) {
                        eprintln!("input error: cannot write {}: {e}", path.display());
                        return 2;
                    }
                }
                None => print!("{rendered}"),
            }
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

/// Runs a command on a parsed document.
pub fn execute(cfg: &RunConfig, doc: &InputDocument) -> Res<Output> {
    let k = doc.field(cfg.prime, default_prime()?)?;
    let ctx = Ctx { cfg, doc, k };
    match cfg.command {
        Command::Resolve => ctx.resolve(),
        Command::Betti => ctx.betti(),
        Command::Hilbert => ctx.hilbert(),
        Command::Ext => ctx.ext(),
        Command::CohomologyTable => ctx.cohomology(),
        Command::SplitCheck => ctx.split_check(),
        Command::HorrocksResolution => ctx.horrocks(),
        Command::BggF => ctx.bgg_f(),
        Command::BggG => ctx.bgg_g(),
        Command::Minimalize => ctx.minimalize(),
        Command::Tate => ctx.tate(),
        Command::Strands => ctx.strands(),
        Command::Ht => ctx.ht(),
        Command::EmFixture => ctx.em_fixture(),
    }
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    doc: &'a InputDocument,
    k: Fp,
}

impl Ctx<'_> {
    fn module_name(&self) -> Res<&str> {
        self.cfg.module.as_deref().ok_or_else(|| RunError::Input(format!("{} needs --module", self.cfg.command.name())))
    }

    fn module(&self) -> Res<ModulePresentation<Fp>> {
        Ok(self.doc.module(self.module_name()?, self.k)?)
    }

    fn s_module(&self) -> Res<ModulePresentation<Fp>> {
        let m = self.module()?;
        if m.ring().kind() != RingKind::Symmetric {
            return Err(RunError::Input(format!("{} needs a module over S", self.cfg.command.name())));
        }
        Ok(m)
    }

    fn window(&self) -> Res<Window> {
        self.cfg.window.ok_or_else(|| RunError::Input(format!("{} needs an explicit --window lo..hi", self.cfg.command.name())))
    }

    fn resolve(&self) -> Res<Output> {
        let res = resolve(&self.s_module()?)?;
        Ok(complex_output(&res, true))
    }

    fn betti(&self) -> Res<Output> {
        let res = resolve(&self.s_module()?)?;
        let betti = res.betti();
        let reg = regularity(&res);
        let text = format!("{}regularity: {}\n", betti.to_text(), reg.map_or("-".into(), |r| r.to_string()));
        Ok(Output { text, json: json!({ "betti": betti, "regularity": reg }) })
    }

    fn hilbert(&self) -> Res<Output> {
        let m = self.s_module()?;
        let w = self.window()?;
        let h = HilbertData::of(&m)?;
        let values: Vec<(i64, usize)> = (w.lo..=w.hi).map(|d| (d, m.dim(d))).collect();
        let mut text = format!("krull dimension: {}\nhilbert polynomial coefficients (c_0, c_1, ...): {}\n", h.krull_dim, h.hilbert_polynomial.join(" "));
        text.push_str(&format!("{:>6} | dim\n", "d"));
        for (d, v) in &values {
            text.push_str(&format!("{d:>6} | {v}\n"));
        }
        let json = json!({ "krull_dim": h.krull_dim, "hilbert_polynomial": h.hilbert_polynomial, "values": values });
        Ok(Output { text, json })
    }

    fn ext(&self) -> Res<Output> {
        let m = self.s_module()?;
        let w = self.window()?;
        let ext = ExtModules::new(&m)?;
        let n = ext.n();
        let mut rows = Vec::new();
        for j in 0..=n as i64 + 1 {
            rows.push((w.lo..=w.hi).map(|d| ext.dim(j, d)).collect::<koszul::Result<Vec<usize>>>()?);
        }
        let heads: Vec<String> = (w.lo..=w.hi).map(|d| d.to_string()).collect();
        let cw = rows.iter().flatten().map(|v| v.to_string().len()).chain(heads.iter().map(|h| h.len())).max().unwrap_or(1) + 1;
        let mut text = String::new();
        for (j, r) in rows.iter().enumerate() {
            text.push_str(&format!("Ext^{j:<3}|"));
            for v in r {
                let c = if *v == 0 { ".".to_string() } else { v.to_string() };
                text.push_str(&format!("{c:>cw$}"));
            }
            text.push('\n');
        }
        text.push_str(&format!("{:<7}|", "d"));
        for h in &heads {
            text.push_str(&format!("{h:>cw$}"));
        }
        text.push('\n');
        let json = json!({ "n": n, "d_lo": w.lo, "d_hi": w.hi, "rows": rows });
        Ok(Output { text, json })
    }

    fn cohomology(&self) -> Res<Output> {
        let w = self.window()?;
        Ok(table_output(&cohomology_table(&self.s_module()?, w.lo, w.hi)?))
    }

    fn split_check(&self) -> Res<Output> {
        let v = horrocks_split_check(&self.s_module()?)?;
        let json = match &v {
            SplitVerdict::Splits(a) => json!({ "splits": true, "twists": a }),
            SplitVerdict::DoesNotSplit { i, d, h } => json!({ "splits": false, "witness": { "i": i, "d": d, "h": h } }),
        };
        Ok(Output { text: v.to_text() + "\n", json })
    }

    fn horrocks(&self) -> Res<Output> {
        let k = horrocks_resolution(&self.s_module()?)?;
        let rep = is_horrocks_complex(&k)?;
        let mut out = complex_output(&k, true);
        let mut extra = String::new();
        for (c, ok) in rep.conditions.iter().enumerate() {
            extra.push_str(&format!("condition ({}): {}\n", c + 1, if *ok { "holds" } else { "fails" }));
        }
        extra.push_str(&format!("krull dimensions of H^p(K): {}\n", krull_text(&rep.krull)));
        extra.push_str(&format!("krull dimensions of H^p(K^dual): {}\n", krull_text(&rep.krull_dual)));
        out.text = extra + &out.text;
        let obj = out.json.as_object_mut().expect("object");
        obj.insert("conditions".into(), json!(rep.conditions));
        obj.insert("krull".into(), json!(rep.krull));
        obj.insert("krull_dual".into(), json!(rep.krull_dual));
        Ok(out)
    }

    /// The Λ-module of an exterior presentation, on all of its (finitely many) degrees.
    fn lambda_module(&self, m: &ModulePresentation<Fp>) -> Res<GradedModule<Fp>> {
        let n = m.ring().n() as i64;
        match m.gens().degree_span() {
            None => Ok(GradedModule::zero(m.ring())),
            Some((a, b)) => Ok(m.graded_module(a, b + n + 1)?),
        }
    }

    fn bgg_f(&self) -> Res<Output> {
        let m = self.module()?;
        if m.ring().kind() != RingKind::Exterior {
            return Err(RunError::Input("bgg-f needs a module over the exterior algebra (\"ring\": \"E\")".into()));
        }
        let c = f_module(&self.lambda_module(&m)?)?;
        Ok(complex_output(&c, true))
    }

    fn bgg_g(&self) -> Res<Output> {
        let m = self.s_module()?;
        let w = self.window()?;
        let c = g_module(&m.graded_module(w.lo, w.hi)?, w.lo, w.hi)?;
        Ok(complex_output(&c, true))
    }

    fn minimalize(&self) -> Res<Output> {
        if let Some(name) = &self.cfg.complex {
            let c = self.doc.complex(name, self.k)?;
            let small = minimize(&c)?.small;
            let mut out = complex_output(&small, true);
            out.text = format!("input\n{}minimal\n{}", c.betti().to_text(), out.text);
            out.json.as_object_mut().expect("object").insert("input_betti".into(), json!(c.betti()));
            return Ok(out);
        }
        let m = self.module()?;
        let fm = match m.ring().kind() {
            RingKind::Exterior => minimalize_f(&ModuleComplex::single(&self.lambda_module(&m)?, 0))?,
            _ => {
                let w = self.window()?;
                let slice = m.graded_module(w.lo - 1, w.hi + 1)?;
                minimalize_g(&ModuleComplex::single(&slice, 0), w.lo, w.hi)?
            }
        };
        Ok(filtered_output(&fm))
    }

    fn tate_window(&self) -> Res<koszul::tate::TateWindow<Fp>> {
        let w = self.window()?;
        Ok(tate_window(&self.s_module()?, w.lo, w.hi)?)
    }

    fn tate(&self) -> Res<Output> {
        let t = self.tate_window()?;
        let mut out = filtered_output(&t.window);
        out.text = format!("tail degree: {}\n{}", t.m, out.text);
        out.json.as_object_mut().expect("object").insert("tail_degree".into(), json!(t.m));
        Ok(out)
    }

    fn strands(&self) -> Res<Output> {
        Ok(table_output(&strand_table(&self.tate_window()?)))
    }

    fn ht(&self) -> Res<Output> {
        let w = self.window()?;
        let ht = ht_complex(&self.tate_window()?)?;
        Ok(ht_output(&ht, w))
    }

    fn em_fixture(&self) -> Res<Output> {
        let e = self.s_module()?;
        let i = self.cfg.index.ok_or_else(|| RunError::Input("em-fixture needs --index i".into()))?;
        let em = em_sheaf(&e, i)?;
        let spec = ModuleSpec::from_presentation(&em.module);
        let mut text = format!("E has krull dimension {}\nM generators: {:?}\nM relation degrees: {:?}\n", em.e_krull, spec.gens, em.module.relations().source().gens());
        for row in em.module.relations().format() {
            text.push_str(&format!("  [{}]\n", row.join(", ")));
        }
        let mut json = json!({ "i": i, "e_krull": em.e_krull, "module": spec });
        if let Some(w) = self.cfg.window {
            let ht = em.expected_ht(w.lo, w.hi)?;
            let o = ht_output(&ht, w);
            text.push_str("expected HT complex\n");
            text.push_str(&o.text);
            json.as_object_mut().expect("object").insert("expected_ht".into(), o.json);
        }
        Ok(Output { text, json })
    }
}

fn krull_text(k: &BTreeMap<i64, i64>) -> String {
    k.iter().map(|(p, d)| format!("{p}:{d}")).collect::<Vec<_>>().join(" ")
}

fn table_output(t: &CohomologyTable) -> Output {
    Output { text: t.to_text(), json: json!(t) }
}

fn differentials_text(c: &FreeComplex<Fp>) -> String {
    let mut s = String::new();
    for p in c.lo()..c.hi() {
        let d = c.diff_ref(p).expect("stored differential");
        if d.rows() == 0 || d.cols() == 0 {
            continue;
        }
        s.push_str(&format!("d^{p}:\n"));
        for row in d.format() {
            s.push_str(&format!("  [{}]\n", row.join(", ")));
        }
    }
    s
}

#[derive(Serialize)]
struct ComplexJson {
    betti: BettiTable,
    complex: ComplexSpec,
}

fn complex_output(c: &FreeComplex<Fp>, with_diffs: bool) -> Output {
    let betti = c.betti();
    let mut text = betti.to_text();
    if with_diffs {
        text.push_str(&differentials_text(c));
    }
    let json = serde_json::to_value(ComplexJson { betti, complex: ComplexSpec::from_complex(c) }).expect("serializes");
    Output { text, json }
}

/// Betti table plus the filtration class of every generator.
fn filtered_output(m: &FilteredMinimalComplex<Fp>) -> Output {
    let mut out = complex_output(&m.complex, false);
    out.text.push_str("classes by position\n");
    for (k, cl) in m.classes.iter().enumerate() {
        out.text.push_str(&format!("{:>6} | {}\n", m.complex.lo() + k as i64, cl.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")));
    }
    out.json.as_object_mut().expect("object").insert("classes".into(), json!(m.classes));
    out
}

fn ht_output(ht: &HTComplex<Fp>, w: Window) -> Output {
    let nf = ht.normal_form();
    let rep = ht_conditions(ht, w.lo, w.hi);
    let n = ht.n;
    let mut strands = CohomologyTable::empty(n, w.lo - n as i64, w.hi);
    for i in 0..=n {
        for d in strands.d_lo..=strands.d_hi {
            let p = d + i as i64;
            if p >= w.lo && p <= w.hi {
                let c = ht.strand_counts().get(&(p, i)).copied().unwrap_or(0);
                strands.set(i, d, Some(c));
            }
        }
    }
    let mut text = nf.betti.to_text();
    text.push_str("strands\n");
    text.push_str(&strands.to_text());
    text.push_str(&format!("partial: {}\n", if ht.partial { "yes" } else { "no" }));
    text.push_str(&format!("structure: {}\n", if rep.structure { "holds" } else { "fails" }));
    text.push_str(&format!("growth: {}\n", if rep.growth { "holds" } else { "fails" }));
    for (i, kd) in &rep.strand_dual_krull {
        text.push_str(&format!("strand {i}: dual module krull dimension {kd}\n"));
    }
    for (p, e, r) in &nf.ranks {
        text.push_str(&format!("rank of d^{p} in degree {e}: {r}\n"));
    }
    let json = json!({
        "betti": nf.betti,
        "ranks": nf.ranks,
        "strands": strands,
        "partial": ht.partial,
        "structure": rep.structure,
        "growth": rep.growth,
        "strand_dual_krull": rep.strand_dual_krull,
        "complex": ComplexSpec::from_complex(&ht.complex.complex.trimmed()),
    });
    Output { text, json }
}
