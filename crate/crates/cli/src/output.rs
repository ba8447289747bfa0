use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use friendship_paradox::{Analysis, Correlation, GapValue, Paradox, Prediction, Verdict};
use serde_json::{json, Map, Value};

pub fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Fails => "fails",
    }
}

pub fn prediction_str(p: Prediction) -> &'static str {
    match p {
        Prediction::PredictHolds => "holds",
        Prediction::PredictFails => "fails",
        Prediction::PredictZeroGap => "zero_gap",
    }
}

pub fn corr_json(c: &Correlation) -> Value {
    match c.value() {
        Some(r) => json!(r),
        None => json!("undefined"),
    }
}

pub fn gap_json(g: &GapValue) -> Value {
    json!({ "value": g.value, "verdict": verdict_str(g.verdict), "zero": g.zero })
}

/// The frozen per-graph JSON document.
pub fn analysis_json(a: &Analysis) -> Value {
    let c = &a.class;
    let mut gaps = Map::new();
    for (p, g) in a.gaps.iter() {
        gaps.insert(p.key().to_string(), gap_json(g));
    }
    let r = &a.correlations;
    let mut correlations = Map::new();
    for (key, p) in [
        ("d_a", Paradox::Lafp),
        ("delta_a", Paradox::Safp),
        ("w_a", Paradox::Lwafp),
        ("gamma_a", Paradox::Swafp),
    ] {
        let value = corr_json(r.associated(p).expect("attribute paradox"));
        let prediction = r.prediction(p).map(prediction_str);
        correlations.insert(key.into(), json!({ "value": value, "prediction": prediction }));
    }
    for (key, corr) in [("d_delta", &r.r_d_delta), ("w_gamma", &r.r_w_gamma), ("d_w", &r.r_dw)] {
        correlations.insert(key.into(), json!({ "value": corr_json(corr), "prediction": null }));
    }
    let details: Vec<Value> = a
        .consistency
        .details
        .iter()
        .map(|d| {
            json!({
                "paradox": d.paradox.key(),
                "consistent": d.consistent,
                "gap": d.gap,
                "correlation": d.correlation.map_or(json!("undefined"), |r| json!(r)),
            })
        })
        .collect();
    json!({
        "graph": {
            "n": c.nodes,
            "m": c.edges,
            "connected": c.connected,
            "regular": c.regular,
            "weighted_regular": c.weighted_regular,
            "isolates_dropped": a.isolates_dropped,
        },
        "gaps": gaps,
        "correlations": correlations,
        "consistency": { "ok": a.consistency.ok, "details": details },
    })
}

/// Writes pretty JSON to `path`, or to stdout when `path` is `-`.
pub fn write_json(path: &Path, value: &Value) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_out(path, text.as_bytes())
}

/// Writes to `path`, or to stdout when `path` is `-`.
pub fn write_out(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    if path == Path::new("-") {
        std::io::stdout().write_all(bytes)?;
        return Ok(());
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Shortest round-trip representation, for machine-readable files.
pub fn float(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

/// Six significant digits, for terminal tables.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&magnitude) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn sig6_corr(c: &Correlation) -> String {
    c.value().map_or_else(|| "undefined".to_string(), sig6)
}

pub fn ensure_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}
