mod common;

use std::collections::BTreeSet;
use std::process::Command as Process;

use common::{corpus, corpus_dir, schema_dir};
use koszul_cli::*;
use serde_json::Value;

fn doc(name: &str) -> InputDocument {
    parse_input(&std::fs::read_to_string(corpus_dir().join(name)).unwrap()).unwrap()
}

fn exec(command: Command, file: &str, module: &str, window: Option<&str>) -> Output {
    let mut cfg = RunConfig::new(command, corpus_dir().join(file));
    cfg.module = Some(module.into());
    cfg.window = window.map(|w| w.parse().unwrap());
    execute(&cfg, &doc(file)).unwrap()
}

fn binomial(n: i64, k: i64) -> usize {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128) as usize
}

#[test]
fn structure_sheaf_document_parses() {
    let d = parse_input(r#"{"ring": {"n": 2, "field": 32003}, "modules": {"O": {"gens": [0], "relations": []}}}"#).unwrap();
    assert_eq!(d.ring, RingSpec { n: 2, field: Some(32003) });
    let m = d.module("O", d.field(None, 7).unwrap()).unwrap();
    assert_eq!(m.gens().gens(), &[0]);
    assert_eq!(m.relations().cols(), 0);
}

#[test]
fn malformed_documents_are_rejected_with_positions() {
    let text = "{\n  \"ring\": {\"n\": 2},\n  \"modules\": {\"M\": {\"gens\": [0],\n    \"relations\": [[[[[1, 0], 1]]]]}}\n}";
    let e = parse_input(text).unwrap_err();
    assert_eq!(e.line, 4, "{e}");
    assert!(e.column > 0);
    assert!(e.message.contains("length 2, expected 3"), "{e}");
    let cases = [
        (r#"{"ring": {"n": 2, "field": 12}}"#, "not a prime"),
        (r#"{"ring": {"n": 0}}"#, "at least 1"),
        (r#"{"ring": {"n": 1}, "modules": {"M": {"gens": [0], "relations": [[[[[1, 0], 1], [[2, 0], 1]]]]}}}"#, "mixes degrees"),
        (r#"{"ring": {"n": 1}, "modules": {"M": {"gens": [0, 0], "relations": [[[[[1, 0], 1]], [[[0, 2], 1]]]]}}}"#, "not homogeneous"),
        (r#"{"ring": {"n": 1}, "modules": {"M": {"gens": [0], "relations": [[[]]]}}}"#, "declare its degree"),
        (r#"{"ring": {"n": 1, "field": 5}, "modules": {"M": {"gens": [0], "relations": [[[[[1, 0], "1/10"]]]]}}}"#, "not invertible"),
        (r#"{"ring": {"n": 1}, "modules": {"M": {"gens": [0], "relations": [[[[[1, 0], "x"]]]]}}}"#, "malformed coefficient"),
        (r#"{"ring": {"n": 1}, "modules": {"M": {"ring": "E", "gens": [0], "relations": [[[[[2, 0], 1]]]]}}}"#, "exponent above 1"),
        (r#"{"ring": {"n": 1}, "module": {}}"#, "unknown field"),
        (r#"{"ring": {"n": 1}, "complexes": {"C": {"lo": 0, "terms": [[0], [0]]}}}"#, "need 1 differentials"),
        (r#"{"ring": {"n": 1}, "complexes": {"C": {"lo": 0, "terms": [[0], [0]], "diffs": [[[[[[1, 0], 1]]]]]}}}"#, "source generator has degree 0"),
        ("{\"ring\": {\"n\": 1},", "EOF"),
    ];
    for (text, needle) in cases {
        let e = parse_input(text).unwrap_err();
        assert!(e.message.contains(needle), "{text}: {e}");
        assert!(e.line >= 1 && e.column >= 1, "{text}: no position in {e}");
    }
}

#[test]
fn documents_round_trip() {
    for f in ["plane.json", "line.json", "space.json"] {
        let d = doc(f);
        let again = parse_input(&d.to_json()).unwrap();
        assert_eq!(again, d, "{f}");
        let k = d.field(None, 32003).unwrap();
        for name in d.modules.keys() {
            let m = d.module(name, k).unwrap();
            let back = ModuleSpec::from_presentation(&m).build(k, d.ring.n).unwrap();
            assert_eq!(back.relations(), m.relations(), "{f}: {name}");
        }
        for name in d.complexes.keys() {
            let c = d.complex(name, k).unwrap();
            assert_eq!(ComplexSpec::from_complex(&c).build(k, d.ring.n).unwrap(), c);
        }
    }
}

#[test]
fn cohomology_table_of_the_plane_is_binomial() {
    let out = exec(Command::CohomologyTable, "plane.json", "O", Some("-4..3"));
    let rows = out.json["rows"].as_array().unwrap();
    for d in -4i64..=3 {
        let at = |i: usize| rows[i][(d + 4) as usize].as_u64().unwrap() as usize;
        assert_eq!(at(0), binomial(d + 2, 2));
        assert_eq!(at(1), 0);
        assert_eq!(at(2), binomial(-d - 1, 2));
    }
    assert!(out.text.starts_with("h^2"));
}

#[test]
fn split_check_names_the_twists() {
    assert_eq!(exec(Command::SplitCheck, "plane.json", "split", None).text, "splits: O(-1) ⊕ O(2)\n");
    let out = exec(Command::SplitCheck, "plane.json", "euler", None);
    assert_eq!(out.json["witness"]["i"], 1);
}

#[test]
fn ht_of_the_euler_module_is_a_single_term() {
    let out = exec(Command::Ht, "plane.json", "euler", Some("-4..4"));
    let betti = &out.json["betti"];
    let rows = betti["rows"].as_object().unwrap();
    assert_eq!(rows.len(), 1);
    let total: u64 = rows.values().flat_map(|r| r.as_array().unwrap()).map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(total, 1);
    assert!(out.json["ranks"].as_array().unwrap().is_empty());
    let mut cfg = RunConfig::new(Command::EmFixture, corpus_dir().join("plane.json"));
    cfg.module = Some("k".into());
    cfg.index = Some(1);
    cfg.window = Some("-4..4".parse().unwrap());
    let em = execute(&cfg, &doc("plane.json")).unwrap();
    assert_eq!(em.json["expected_ht"]["betti"], *betti);
    assert_eq!(em.json["expected_ht"]["ranks"], out.json["ranks"]);
    // M = Coker(S → S(1)³), the euler module of the corpus up to the sign of the relation
    assert_eq!(em.json["module"]["gens"], serde_json::json!([-1, -1, -1]));
    let m = ModuleSpec::from_presentation(&doc("plane.json").module("euler", koszul::exactlin::Fp::new(32003).unwrap()).unwrap());
    assert_eq!(m.relation_degrees().unwrap(), vec![0]);
}

#[test]
fn commands_need_their_arguments() {
    let d = doc("plane.json");
    let mut cfg = RunConfig::new(Command::Tate, corpus_dir().join("plane.json"));
    cfg.module = Some("O".into());
    assert!(matches!(execute(&cfg, &d), Err(RunError::Input(m)) if m.contains("--window")));
    cfg.module = Some("missing".into());
    cfg.window = Some("-1..1".parse().unwrap());
    assert!(matches!(execute(&cfg, &d), Err(RunError::Input(m)) if m.contains("no module")));
    cfg.command = Command::BggF;
    cfg.module = Some("O".into());
    assert_eq!(execute(&cfg, &d).unwrap_err().exit_code(), 2);
    cfg.command = Command::SplitCheck;
    assert!(execute(&cfg, &doc("line.json")).is_err());
    assert!("3..1".parse::<Window>().is_err());
    assert!("3".parse::<Window>().is_err());
    assert_eq!(RunError::from(koszul::Error::Invariant("x".into())).exit_code(), 1);
    assert_eq!(RunError::from(koszul::Error::InvalidInput("x".into())).exit_code(), 2);
}

#[test]
fn prime_override_changes_the_field() {
    let d = doc("plane.json");
    assert_eq!(d.field(None, 5).unwrap().prime(), 32003);
    assert_eq!(d.field(Some(7), 5).unwrap().prime(), 7);
    assert_eq!(doc("line.json").field(None, 5).unwrap().prime(), 5);
    assert!(d.field(Some(8), 5).is_err());
    // the conic's -1/2 needs 2 to be invertible
    let mut cfg = RunConfig::new(Command::Betti, corpus_dir().join("plane.json"));
    cfg.module = Some("conic".into());
    cfg.prime = Some(2);
    assert_eq!(execute(&cfg, &d).unwrap_err().exit_code(), 2);
    cfg.prime = Some(5);
    assert!(execute(&cfg, &d).is_ok());
}

fn bin() -> Process {
    Process::new(env!("CARGO_BIN_EXE_koszul"))
}

#[test]
fn binary_exit_codes_and_outputs() {
    let plane = corpus_dir().join("plane.json");
    let ok = bin().args(["cohomology-table", plane.to_str().unwrap(), "--module", "O", "--window", "-4..3"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8(ok.stdout).unwrap().contains("h^0"));
    let no_window = bin().args(["strands", plane.to_str().unwrap(), "--module", "O"]).output().unwrap();
    assert_eq!(no_window.status.code(), Some(2));
    assert!(String::from_utf8(no_window.stderr).unwrap().contains("--window"));
    let dir = std::env::temp_dir().join(format!("koszul-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\n \"ring\": {\"n\": 2},\n \"modules\": {\"M\": {\"gens\": [0], \"relations\": [[[[[1], 1]]]]}}\n}").unwrap();
    let e = bin().args(["betti", bad.to_str().unwrap(), "--module", "M"]).output().unwrap();
    assert_eq!(e.status.code(), Some(2));
    assert!(String::from_utf8(e.stderr).unwrap().contains("line 3"));
    let out = dir.join("table.json");
    let j = bin()
        .args(["cohomology-table", plane.to_str().unwrap(), "--module", "O", "--window=-1..1", "--format", "json", "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(j.status.code(), Some(0));
    assert!(j.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["rows"][0], serde_json::json!([0, 1, 3]));
    // the environment prime applies when the document names none
    let line = corpus_dir().join("line.json");
    let env = bin().env(PRIME_ENV, "9").args(["betti", line.to_str().unwrap(), "--module", "O"]).output().unwrap();
    assert_eq!(env.status.code(), Some(2));
    let env = bin().env(PRIME_ENV, "11").args(["betti", line.to_str().unwrap(), "--module", "O"]).output().unwrap();
    assert_eq!(env.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).unwrap();
}

fn validator(def: &str) -> jsonschema::Validator {
    let all: Value = serde_json::from_str(&std::fs::read_to_string(schema_dir().join("output.schema.json")).unwrap()).unwrap();
    let schema = serde_json::json!({ "$defs": all["$defs"], "$ref": format!("#/$defs/{def}") });
    jsonschema::validator_for(&schema).unwrap()
}

fn schema_for(c: Command, cfg: &RunConfig) -> &'static str {
    match c {
        Command::Resolve | Command::BggF | Command::BggG => "complex_output",
        Command::Betti => "betti_output",
        Command::Hilbert => "hilbert_output",
        Command::Ext => "ext_output",
        Command::CohomologyTable | Command::Strands => "table",
        Command::SplitCheck => "split_output",
        Command::HorrocksResolution => "horrocks_output",
        Command::Minimalize if cfg.complex.is_some() => "minimalize_output",
        Command::Minimalize => "filtered_output",
        Command::Tate => "tate_output",
        Command::Ht => "ht_output",
        Command::EmFixture => "em_output",
    }
}

#[test]
fn json_outputs_validate_against_the_schemas() {
    let input: Value = serde_json::from_str(&std::fs::read_to_string(schema_dir().join("input.schema.json")).unwrap()).unwrap();
    let input = jsonschema::validator_for(&input).unwrap();
    for f in ["plane.json", "line.json", "space.json"] {
        let v: Value = serde_json::from_str(&std::fs::read_to_string(corpus_dir().join(f)).unwrap()).unwrap();
        assert!(input.is_valid(&v), "{f}");
        let again: Value = serde_json::from_str(&doc(f).to_json()).unwrap();
        assert!(input.is_valid(&again), "{f} reserialized");
    }
    let mut seen = BTreeSet::new();
    for inv in corpus() {
        let d = parse_input(&std::fs::read_to_string(&inv.cfg.input).unwrap()).unwrap();
        let out = execute(&inv.cfg, &d).unwrap();
        let v = validator(schema_for(inv.cfg.command, &inv.cfg));
        let errors: Vec<String> = v.iter_errors(&out.json).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{:?}: {errors:?}", inv.args);
        seen.insert(inv.cfg.command.name());
    }
    assert_eq!(seen.len(), Command::ALL.len(), "every command is in the corpus");
}

/// Integers in a text rendering, skipping variable names and superscript labels.
fn text_numbers(s: &str) -> BTreeSet<i64> {
    let mut out = BTreeSet::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let start = i;
        let neg = chars[i] == '-' && i + 1 < chars.len() && chars[i + 1].is_ascii_digit();
        if neg || chars[i].is_ascii_digit() {
            let prev = if start > 0 { chars[start - 1] } else { ' ' };
            i += usize::from(neg);
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let label = prev.is_alphabetic() || prev == '^' || prev == '(' || prev == '_';
            if !label {
                out.insert(chars[start..i].iter().collect::<String>().parse().unwrap());
            }
        } else {
            i += 1;
        }
    }
    out
}

fn json_numbers(v: &Value, out: &mut BTreeSet<i64>) {
    match v {
        Value::Number(n) => {
            out.insert(n.as_i64().unwrap());
        }
        Value::String(s) => {
            out.extend(text_numbers(s));
        }
        Value::Array(a) => a.iter().for_each(|x| json_numbers(x, out)),
        Value::Object(o) => {
            for (k, x) in o {
                if let Ok(n) = k.parse() {
                    out.insert(n);
                }
                json_numbers(x, out);
            }
        }
        _ => {}
    }
}

#[test]
fn text_and_json_carry_the_same_numbers() {
    for inv in corpus() {
        let d = parse_input(&std::fs::read_to_string(&inv.cfg.input).unwrap()).unwrap();
        let out = execute(&inv.cfg, &d).unwrap();
        let mut js = BTreeSet::new();
        json_numbers(&out.json, &mut js);
        // window bounds, positions and table columns may appear only as ranges in the JSON
        if let Some(w) = inv.cfg.window {
            js.extend(w.lo - 3..=w.hi + 1);
        }
        if let Some(lo) = out.json.get("d_lo").and_then(Value::as_i64) {
            js.extend(lo..=out.json["d_hi"].as_i64().unwrap());
        }
        let missing: Vec<i64> = text_numbers(&out.text).difference(&js).copied().collect();
        assert!(missing.is_empty(), "{:?}: {missing:?} only in text", inv.args);
    }
}
