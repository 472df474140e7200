//! wasm-bindgen exports for `www/index.html`.
//!
//! Each export recomputes the pipeline for `m`; the page caches nothing.

use bianchi::figures;
use bianchi::report::{alpha_report, compute_report, les_report, theorem_report, Pipeline};
use wasm_bindgen::prelude::*;

fn pipeline(m: i32) -> Result<Pipeline, String> {
    Pipeline::compute(m as i64).map_err(|e| e.to_string())
}

pub fn bottom_facets(m: i32) -> Result<String, String> {
    Ok(figures::bottom_facets_svg(&pipeline(m)?.polyhedron))
}

pub fn imaginary_plane(m: i32) -> Result<String, String> {
    Ok(figures::imaginary_plane_svg(&pipeline(m)?.polyhedron))
}

/// Compute, theorem, alpha and LES reports in one JSON object.
pub fn homology_report(m: i32) -> Result<String, String> {
    let p = pipeline(m)?;
    let e = |e: bianchi::report::PipelineError| e.to_string();
    let v = serde_json::json!({
        "compute": compute_report(&p).map_err(e)?,
        "theorem": theorem_report(&p).map_err(e)?,
        "alpha": alpha_report(&p).map_err(e)?,
        "les": les_report(&p).map_err(e)?,
    });
    Ok(serde_json::to_string_pretty(&v).expect("report serializes"))
}

#[wasm_bindgen]
pub fn bottom_facets_svg(m: i32) -> Result<String, JsValue> {
    bottom_facets(m).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn imaginary_plane_svg(m: i32) -> Result<String, JsValue> {
    imaginary_plane(m).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn homology_report_json(m: i32) -> Result<String, JsValue> {
    homology_report(m).map_err(|e| JsValue::from_str(&e))
}
