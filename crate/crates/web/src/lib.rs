//! WebAssembly bindings for the demo page. Each export takes the input document as JSON
//! text and returns the rendered table, or the error message as a thrown string.

use koszul_cli::{execute, parse_input, Command, Format, RunConfig, Window};
use wasm_bindgen::prelude::*;

/// The operations offered by the page.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operation {
    Cohomology,
    Strands,
    Tate,
}

impl Operation {
    fn command(self) -> Command {
        match self {
            Operation::Cohomology => Command::CohomologyTable,
            Operation::Strands => Command::Strands,
            Operation::Tate => Command::Tate,
        }
    }
}

/// Runs `op` on module `module` of `document` over degrees `lo..hi`.
pub fn compute(op: Operation, document: &str, module: &str, lo: i64, hi: i64, json: bool) -> Result<String, String> {
    let doc = parse_input(document).map_err(|e| format!("input error: {e}"))?;
    let mut cfg = RunConfig::new(op.command(), "document");
    cfg.module = Some(module.to_string());
    cfg.window = Some(Window { lo, hi });
    cfg.format = if json { Format::Json } else { Format::Table };
    let out = execute(&cfg, &doc).map_err(|e| e.to_string())?;
    Ok(out.render(cfg.format))
}

/// Names of the modules in `document`, as a JSON array.
pub fn module_names(document: &str) -> Result<String, String> {
    let doc = parse_input(document).map_err(|e| format!("input error: {e}"))?;
    Ok(serde_json::to_string(&doc.modules.keys().collect::<Vec<_>>()).expect("names serialize"))
}

#[wasm_bindgen(js_name = cohomologyTable)]
pub fn cohomology_table(document: &str, module: &str, lo: i64, hi: i64, json: bool) -> Result<String, String> {
    compute(Operation::Cohomology, document, module, lo, hi, json)
}

#[wasm_bindgen(js_name = strandTable)]
pub fn strand_table(document: &str, module: &str, lo: i64, hi: i64, json: bool) -> Result<String, String> {
    compute(Operation::Strands, document, module, lo, hi, json)
}

#[wasm_bindgen(js_name = tateWindow)]
pub fn tate_window(document: &str, module: &str, lo: i64, hi: i64, json: bool) -> Result<String, String> {
    compute(Operation::Tate, document, module, lo, hi, json)
}

#[wasm_bindgen(js_name = moduleNames)]
pub fn module_names_js(document: &str) -> Result<String, String> {
    module_names(document)
}
