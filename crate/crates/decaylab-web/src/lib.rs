//! Browser bindings for the lab: list the catalog, run one scenario, and
//! refit a window of any sampled column. Everything crosses the boundary
//! as JSON strings so the page needs no generated classes, and the inner
//! functions stay plain Rust so they test natively.

use decaylab::functionals::CSV_COLUMNS;
use decaylab::ratefit::{boundedness_score, fit_power, fit_sqrtlog};
use decaylab::scenarios::{
    builtin_catalog, run_scenario_with_series, svg_string, ScenarioConfig,
};
use serde_json::{json, Map, Value};
use wasm_bindgen::prelude::*;

/// Coarsening floor: even aggressive settings keep a resolvable field.
const MIN_POINTS: usize = 65;

fn catalog_entry(id: &str) -> Result<ScenarioConfig, String> {
    builtin_catalog()
        .into_iter()
        .find(|c| c.id == id)
        .ok_or_else(|| format!("unknown scenario '{id}'"))
}

fn list_json() -> String {
    let list: Vec<Value> = builtin_catalog()
        .iter()
        .map(|c| {
            json!({
                "id": c.id,
                "title": c.title,
                "kind": c.kind.as_str(),
                "dim": c.grid.dim,
                "points_per_axis": c.grid.points_per_axis,
                "horizon": c.horizon,
                "expected": c.expected.to_string(),
                "notes": c.notes,
            })
        })
        .collect();
    serde_json::to_string(&list).expect("catalog serializes")
}

/// Run a catalog scenario, optionally on a coarsened grid (`coarsen` > 1
/// keeps every c-th point per axis) and with a shortened horizon, so a
/// browser tab stays responsive. Returns `{report, svg, columns}` where
/// `columns` maps each sampled column to its `[[t, y], ...]` pairs.
fn run_json(id: &str, coarsen: u32, horizon: f64) -> Result<String, String> {
    let mut cfg = catalog_entry(id)?;
    if coarsen > 1 {
        let step = coarsen as usize;
        let n = cfg.grid.points_per_axis;
        cfg.grid.points_per_axis = ((n - 1) / step + 1).max(MIN_POINTS);
    }
    if horizon > 0.0 && horizon < cfg.horizon {
        cfg.horizon = horizon;
    }
    let (report, series) = run_scenario_with_series(&cfg).map_err(|e| e.to_string())?;
    let svg = series.as_ref().map(|s| svg_string(&report, s));
    let columns = series.as_ref().map(|s| {
        let mut cols = Map::new();
        for name in CSV_COLUMNS.iter().skip(1) {
            if let Some(pairs) = s.column(name) {
                cols.insert((*name).to_string(), json!(pairs));
            }
        }
        cols
    });
    serde_json::to_string(&json!({
        "report": report,
        "svg": svg,
        "columns": columns,
    }))
    .map_err(|e| e.to_string())
}

/// Fit `[[t, y], ...]` pairs on `[t0, t1]` with one of the lab's three
/// models. `data_scale` and `ratio_cap` only matter for `bounded`.
fn fit_json(
    points_json: &str,
    model: &str,
    t0: f64,
    t1: f64,
    data_scale: f64,
    ratio_cap: f64,
) -> Result<String, String> {
    let pts: Vec<(f64, f64)> =
        serde_json::from_str(points_json).map_err(|e| format!("bad points payload: {e}"))?;
    let window = (t0, t1);
    let value = match model {
        "power" => serde_json::to_value(fit_power(&pts, window).map_err(|e| e.to_string())?),
        "sqrtlog" => {
            serde_json::to_value(fit_sqrtlog(&pts, window).map_err(|e| e.to_string())?)
        }
        "bounded" => serde_json::to_value(
            boundedness_score(&pts, window, data_scale, ratio_cap)
                .map_err(|e| e.to_string())?,
        ),
        other => {
            return Err(format!("unknown model '{other}' (expected power, sqrtlog, bounded)"))
        }
    }
    .map_err(|e| e.to_string())?;
    Ok(value.to_string())
}

#[wasm_bindgen]
pub fn list_scenarios() -> String {
    list_json()
}

#[wasm_bindgen]
pub fn run_scenario_json(id: &str, coarsen: u32, horizon: f64) -> Result<String, JsValue> {
    run_json(id, coarsen, horizon).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn fit_series_json(
    points_json: &str,
    model: &str,
    t0: f64,
    t1: f64,
    data_scale: f64,
    ratio_cap: f64,
) -> Result<String, JsValue> {
    fit_json(points_json, model, t0, t1, data_scale, ratio_cap)
        .map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_carries_the_whole_catalog() {
        let parsed: Vec<Value> = serde_json::from_str(&list_json()).unwrap();
        let ids: Vec<&str> =
            parsed.iter().map(|e| e["id"].as_str().unwrap()).collect();
        assert_eq!(ids.len(), builtin_catalog().len());
        assert!(ids.contains(&"S3-klein-gordon"));
        for e in &parsed {
            assert!(e["horizon"].as_f64().unwrap() > 0.0);
            assert!(!e["title"].as_str().unwrap().is_empty());
        }
    }

    #[test]
    fn run_returns_report_svg_and_columns() {
        let payload = run_json("S3-klein-gordon", 1, 20.0).unwrap();
        let v: Value = serde_json::from_str(&payload).unwrap();
        assert_eq!(v["report"]["outcome"], "pass");
        assert_eq!(v["report"]["config"]["horizon"], 20.0);
        assert!(v["svg"].as_str().unwrap().starts_with("<svg"));
        let energy = v["columns"]["energy"].as_array().unwrap();
        assert!(energy.len() > 10);
        assert_eq!(energy[0][0], 0.0);
        assert!(energy[0][1].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn coarsening_shrinks_the_grid_but_not_below_the_floor() {
        let payload = run_json("S5-localized-potential", 4, 30.0).unwrap();
        let v: Value = serde_json::from_str(&payload).unwrap();
        // 1201 points coarsened 4x: (1200 / 4) + 1
        assert_eq!(v["report"]["config"]["grid"]["points_per_axis"], 301);

        let payload = run_json("S3-klein-gordon", 4, 10.0).unwrap();
        let v: Value = serde_json::from_str(&payload).unwrap();
        // 101 points would coarsen to 26; the floor holds at 65
        assert_eq!(v["report"]["config"]["grid"]["points_per_axis"], 65);
    }

    #[test]
    fn unknown_scenario_is_a_clean_error() {
        let err = run_json("S99-nope", 1, 0.0).unwrap_err();
        assert!(err.contains("S99-nope"));
    }

    #[test]
    fn fit_recovers_a_planted_power_law() {
        let pts: Vec<(f64, f64)> =
            (1..=200).map(|i| (i as f64, 3.0 * (i as f64).powf(-1.5))).collect();
        let json = serde_json::to_string(&pts).unwrap();
        let v: Value =
            serde_json::from_str(&fit_json(&json, "power", 10.0, 200.0, 0.0, 0.0).unwrap())
                .unwrap();
        assert!((v["exponent"].as_f64().unwrap() + 1.5).abs() < 1e-9);
        assert!((v["prefactor"].as_f64().unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn fit_bounded_flags_a_flat_series() {
        let pts: Vec<(f64, f64)> = (1..=100).map(|i| (i as f64, 2.0)).collect();
        let json = serde_json::to_string(&pts).unwrap();
        let v: Value = serde_json::from_str(
            &fit_json(&json, "bounded", 5.0, 100.0, 1.0, 3.0).unwrap(),
        )
        .unwrap();
        assert_eq!(v["bounded"], true);
        assert_eq!(v["exponent"].as_f64().unwrap(), 0.0);
        assert_eq!(v["ratio"].as_f64().unwrap(), 2.0);
    }

    #[test]
    fn fit_rejects_bad_model_and_bad_payload() {
        assert!(fit_json("[[1.0, 1.0]]", "cubic", 0.0, 1.0, 0.0, 0.0)
            .unwrap_err()
            .contains("cubic"));
        assert!(fit_json("not json", "power", 0.0, 1.0, 0.0, 0.0)
            .unwrap_err()
            .contains("bad points payload"));
    }
}
