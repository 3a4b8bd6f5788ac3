//! Browser bindings for the demo page. Every export takes and returns JSON
//! strings so the page needs no generated TypeScript types.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use quakespec::analysis::{analyze_record, RunConfig};
use quakespec::response::{self, PeriodGrid, SpectraConfig};
use quakespec::spectral::{self, Window};
use quakespec::stats::{classify_r2, R2Matrix};
use quakespec::synth::{generate, SynthSpec};
use quakespec::{Component, Error};

/// The published matrix shipped with the crate.
pub const REFERENCE_R2_CSV: &str = include_str!("../../core/data/reference_r2.csv");

fn to_js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

fn parse_spec(spec_json: &str) -> Result<SynthSpec, Error> {
    let spec: SynthSpec = serde_json::from_str(spec_json)?;
    spec.validate()?;
    Ok(spec)
}

/// Thins a series to at most `max` points for plotting.
fn thin(xs: &[f64], max: usize) -> (usize, Vec<f64>) {
    let step = xs.len().div_ceil(max).max(1);
    (step, xs.iter().step_by(step).copied().collect())
}

/// Generates a synthetic record and computes its spectra and parameters.
pub fn analyze_synthetic_json(spec_json: &str, hann: bool) -> Result<Value, Error> {
    let spec = parse_spec(spec_json)?;
    let acc = generate(&spec)?;
    let cfg = RunConfig {
        window: if hann { Window::Hann } else { Window::Rectangular },
        ..RunConfig::default()
    };
    let a = analyze_record(&acc, &cfg, "demo", "demo", Component::H1)?;
    let psd = spectral::power_spectral_density_windowed(&acc, cfg.max_df, cfg.window)?;
    let f_max = 25.0_f64.min(0.5 / acc.dt());
    let n_psd = ((f_max / psd.df) as usize + 1).min(psd.len());
    let (step, samples) = thin(acc.samples(), 4000);
    Ok(json!({
        "dt": acc.dt() * step as f64,
        "samples": samples,
        "psd": { "df": psd.df, "ordinates": &psd.ordinates[..n_psd] },
        "parameters": a.parameters,
        "auxiliary": a.auxiliary,
        "failures": a.failures,
    }))
}

pub fn response_spectra_json(spec_json: &str, damping: f64) -> Result<Value, Error> {
    let spec = parse_spec(spec_json)?;
    let acc = generate(&spec)?;
    let cfg = SpectraConfig::from_grid(damping, PeriodGrid::default())?;
    let rs = response::response_spectra(&acc, &cfg)?;
    let ep = response::effective_peaks(&rs).ok();
    Ok(json!({
        "damping": damping,
        "periods": rs.periods,
        "sd": rs.sd,
        "sv": rs.sv,
        "sa": rs.sa,
        "psv": rs.psv,
        "ei": rs.ei,
        "t_gsa": response::spectrum_peak_period(&rs.sa, &rs.periods).ok(),
        "t_gsv": response::spectrum_peak_period(&rs.sv, &rs.periods).ok(),
        "t_c": ep.and_then(|e| response::characteristic_period_tc(&e).ok()),
    }))
}

pub fn classify_matrix_json(csv: &str) -> Result<Value, Error> {
    let m = R2Matrix::parse_csv(csv)?;
    let params = m.square_params();
    let counts = m.classify_pairs(&params);
    let mut pairs = Vec::new();
    for (i, &x) in params.iter().enumerate() {
        for &y in &params[i + 1..] {
            if let Some(r2) = m.get(x, y).or_else(|| m.get(y, x)) {
                pairs.push(json!({ "x": x.name(), "y": y.name(), "r2": r2, "class": classify_r2(r2.clamp(0.0, 1.0)) }));
            }
        }
    }
    let (g, mo, w) = counts.percentages();
    Ok(json!({
        "params": params.iter().map(|p| p.name()).collect::<Vec<_>>(),
        "counts": { "good": counts.good, "moderate": counts.moderate, "weak": counts.weak },
        "percent": { "good": g, "moderate": mo, "weak": w },
        "summary": counts.to_string(),
        "pairs": pairs,
    }))
}

#[wasm_bindgen]
pub fn analyze_synthetic(spec_json: &str, hann: bool) -> Result<String, JsError> {
    analyze_synthetic_json(spec_json, hann).map(|v| v.to_string()).map_err(to_js)
}

#[wasm_bindgen]
pub fn response_spectra(spec_json: &str, damping: f64) -> Result<String, JsError> {
    response_spectra_json(spec_json, damping).map(|v| v.to_string()).map_err(to_js)
}

#[wasm_bindgen]
pub fn classify_matrix(csv: &str) -> Result<String, JsError> {
    classify_matrix_json(csv).map(|v| v.to_string()).map_err(to_js)
}

#[wasm_bindgen]
pub fn reference_r2_csv() -> String {
    REFERENCE_R2_CSV.to_string()
}
