//! WebAssembly bindings for the browser demo. Every export returns a JSON
//! string; errors surface as JavaScript exceptions carrying the message.

use replisure::tables::{curves_table, log_grid, power_profile_table};
use replisure::{assess_pair, combined_ci, normalize_pair, power_for_pair, Dataset, Design, StudyEffect, StudyPair};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn to_js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// Labels of the bundled study pairs, as a JSON array.
#[wasm_bindgen(js_name = studyLabels)]
pub fn study_labels() -> String {
    let data = Dataset::bundled();
    serde_json::to_string(&data.iter().map(|p| p.label.as_str()).collect::<Vec<_>>()).expect("serialisable")
}

/// Comparison curves of the sceptical and two-trials p-values against the
/// relative sample size, as a table in JSON.
#[wasm_bindgen]
pub fn curves(p_original: f64, rel_effect: f64, c_min: f64, c_max: f64, points: usize) -> Result<String, JsError> {
    to_js(curves_json(p_original, rel_effect, c_min, c_max, points))
}

pub fn curves_json(p_original: f64, rel_effect: f64, c_min: f64, c_max: f64, points: usize) -> Result<String, String> {
    let grid = log_grid(c_min, c_max, points).map_err(|e| e.to_string())?;
    let table = curves_table(p_original, rel_effect, &grid).map_err(|e| e.to_string())?;
    Ok(table.to_json())
}

/// Power profile of a bundled study. A non-positive or NaN `c` means the
/// study's own variance ratio.
#[wasm_bindgen(js_name = powerProfile)]
pub fn power_profile(label: &str, c: f64, alpha: f64, points: usize) -> Result<String, JsError> {
    to_js(power_profile_json(label, c, alpha, points))
}

pub fn power_profile_json(label: &str, c: f64, alpha: f64, points: usize) -> Result<String, String> {
    let data = Dataset::bundled();
    let pair = data.get(label).ok_or_else(|| format!("no study labelled `{label}`"))?;
    let c = (c > 0.0).then_some(c);
    let table = power_profile_table(pair, c, alpha, points).map_err(|e| e.to_string())?;
    Ok(table.to_json())
}

/// Assessment, power and combined interval for a user-entered pair of
/// hazard ratios with 95% intervals. A margin of 1 means superiority.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn assess(
    margin_hr: f64,
    rct_hr: f64,
    rct_lo: f64,
    rct_hi: f64,
    rwe_hr: f64,
    rwe_lo: f64,
    rwe_hi: f64,
    alpha: f64,
) -> Result<String, JsError> {
    to_js(assess_json(margin_hr, [rct_hr, rct_lo, rct_hi], [rwe_hr, rwe_lo, rwe_hi], alpha))
}

pub fn assess_json(margin_hr: f64, rct: [f64; 3], rwe: [f64; 3], alpha: f64) -> Result<String, String> {
    let err = |e: replisure::Error| e.to_string();
    let design = if margin_hr == 1.0 { Design::Superiority } else { Design::NonInferiority };
    let pair = StudyPair::new(
        "custom",
        design,
        margin_hr,
        StudyEffect::new(rct[0], rct[1], rct[2]).map_err(err)?,
        StudyEffect::new(rwe[0], rwe[1], rwe[2]).map_err(err)?,
        false,
    )
    .map_err(err)?;
    let assessment = assess_pair(&pair, alpha).map_err(err)?;
    let power = power_for_pair(&normalize_pair(&pair), alpha).map_err(err)?;
    let ci = match combined_ci(&pair, alpha) {
        Ok(ci) => json!(ci),
        Err(e) => json!({ "error": e.to_string() }),
    };
    Ok(json!({ "assessment": assessment, "power": power, "interval": ci }).to_string())
}
