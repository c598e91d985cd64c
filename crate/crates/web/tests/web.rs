use koszul_web::{cohomology_table, compute, module_names, strand_table, tate_window, Operation};
use serde_json::Value;

fn sample() -> String {
    std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/www/sample.json")).unwrap()
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

/// (i, d, h) triples of a rendered table.
fn entries(v: &Value) -> Vec<(u64, i64, Option<u64>)> {
    let table = v.get("table").unwrap_or(v);
    let lo = table["d_lo"].as_i64().unwrap();
    let mut out = Vec::new();
    for (i, row) in table["rows"].as_array().unwrap().iter().enumerate() {
        for (j, h) in row.as_array().unwrap().iter().enumerate() {
            out.push((i as u64, lo + j as i64, h.as_u64()));
        }
    }
    out
}

#[test]
fn sample_document_lists_its_modules() {
    let names: Vec<String> = serde_json::from_str(&module_names(&sample()).unwrap()).unwrap();
    assert_eq!(names, ["O", "euler", "point", "split"]);
}

#[test]
fn structure_sheaf_table_counts_monomials() {
    let t = json(&cohomology_table(&sample(), "O", -4, 4, true).unwrap());
    for (i, d, h) in entries(&t) {
        let want = match i {
            0 if d >= 0 => ((d + 1) * (d + 2) / 2) as u64,
            2 if d <= -3 => ((-d - 1) * (-d - 2) / 2) as u64,
            _ => 0,
        };
        assert_eq!(h, Some(want), "h^{i}(O({d}))");
    }
}

#[test]
fn strands_agree_with_the_table() {
    for name in ["O", "split", "euler", "point"] {
        let a = json(&cohomology_table(&sample(), name, -3, 3, true).unwrap());
        let b = json(&strand_table(&sample(), name, -3, 3, true).unwrap());
        let known: Vec<_> = entries(&b).into_iter().filter(|e| e.2.is_some()).collect();
        let mut compared = 0;
        for (i, d, h) in known {
            if let Some(e) = entries(&a).into_iter().find(|e| e.0 == i && e.1 == d) {
                assert_eq!(e.2, h, "{name}: h^{i}({d})");
                compared += 1;
            }
        }
        assert!(compared >= 7, "{name}: only {compared} entries compared");
    }
}

#[test]
fn tate_window_renders_both_formats() {
    let text = tate_window(&sample(), "euler", -2, 2, false).unwrap();
    assert!(!text.is_empty());
    let v = json(&tate_window(&sample(), "euler", -2, 2, true).unwrap());
    assert!(v.get("complex").is_some(), "{v}");
}

#[test]
fn errors_come_back_as_messages() {
    let err = compute(Operation::Cohomology, "{\"ring\": {\"n\": 2},\n \"modules\": 3}", "O", 0, 1, false).unwrap_err();
    assert!(err.starts_with("input error: line 2"), "{err}");
    let err = compute(Operation::Cohomology, &sample(), "missing", 0, 1, false).unwrap_err();
    assert!(err.contains("missing"), "{err}");
    assert!(compute(Operation::Strands, &sample(), "O", 3, 1, false).is_err());
}
