//! Browser bindings for the demo page in `www/`.
//!
//! Every export returns a JSON string. The work happens in plain functions so
//! the native test suite can call them without a JavaScript host.

use maxexp::exponents::scan_checkpoints;
use maxexp::verify::{count_rows, default_grid, moment_rows, ConvergenceRow, CountTableKind, Predictions, Stat};
use maxexp::{Builtin, ConstantEstimate, ScanConfig};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Scans in the page run on the main thread; keep them short.
pub const MAX_BROWSER_X: u64 = 5_000_000;

#[derive(Serialize)]
struct DistRow {
    k: u64,
    pmf: f64,
    cdf: f64,
}

#[derive(Serialize)]
struct DistView {
    f: String,
    table: Vec<DistRow>,
    mean: Option<ConstantEstimate>,
    second_moment: Option<ConstantEstimate>,
}

#[derive(Serialize)]
struct ConvergenceView {
    stat: Stat,
    power: u32,
    rows: Vec<ConvergenceRow>,
}

#[derive(Serialize)]
struct CountView {
    kind: &'static str,
    k: u32,
    rows: Vec<ConvergenceRow>,
}

fn check_x(max_x: u64) -> Result<(), String> {
    if !(1..=MAX_BROWSER_X).contains(&max_x) {
        return Err(format!("x must lie in 1..={MAX_BROWSER_X}"));
    }
    Ok(())
}

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// Table of `P(X = k)` and `P(X <= k)` for `k = 1..=kmax`, with the mean and
/// second moment when the function is certified.
pub fn distribution_json(name: &str, kmax: u32) -> Result<String, String> {
    if !(1..=200).contains(&kmax) {
        return Err("kmax must lie in 1..=200".into());
    }
    let f: Builtin = name.parse().map_err(|e: maxexp::Error| e.to_string())?;
    let d = f.distribution().map_err(|e| e.to_string())?;
    let table = (1..=kmax as u64).map(|k| DistRow { k, pmf: d.pmf(k), cdf: d.cdf(k) }).collect();
    json(&DistView { f: f.to_string(), table, mean: d.mean_closed(1e-9).ok(), second_moment: d.second_moment_closed(1e-9).ok() })
}

/// `Σ stat^power` over a doubling grid from 100 against its main term.
pub fn convergence_json(stat: &str, power: u32, max_x: u64) -> Result<String, String> {
    check_x(max_x)?;
    let stat = Stat::parse(stat).ok_or("stat must be M or m")?;
    if !(1..=2).contains(&power) {
        return Err("power must be 1 or 2".into());
    }
    let grid = small_grid(max_x);
    let cps = scan_checkpoints(&grid, &ScanConfig::default()).map_err(|e| e.to_string())?;
    let pred = Predictions::compute().map_err(|e| e.to_string())?;
    let rows = moment_rows(stat, power, &cps, &pred).map_err(|e| e.to_string())?;
    json(&ConvergenceView { stat, power, rows })
}

/// k-free or k-full counts over the same grid against their main terms.
pub fn counts_json(kind: &str, k: u32, max_x: u64) -> Result<String, String> {
    check_x(max_x)?;
    let (kind, label) = match kind {
        "kfree" => (CountTableKind::KFree, "kfree"),
        "kfull" => (CountTableKind::KFull, "kfull"),
        _ => return Err("kind must be kfree or kfull".into()),
    };
    if !(2..=5).contains(&k) {
        return Err("k must lie in 2..=5".into());
    }
    let pred = Predictions::compute().map_err(|e| e.to_string())?;
    let rows = count_rows(kind, k, &small_grid(max_x), &pred).map_err(|e| e.to_string())?;
    json(&CountView { kind: label, k, rows })
}

fn small_grid(max_x: u64) -> Vec<u64> {
    if max_x < 10_000 {
        let mut xs: Vec<u64> = std::iter::successors(Some(100u64), |x| Some(x * 2)).take_while(|&x| x < max_x).collect();
        xs.push(max_x);
        xs
    } else {
        let mut xs: Vec<u64> = (0..7).map(|i| 100u64 << i).filter(|&x| x < 10_000).collect();
        xs.extend(default_grid(max_x));
        xs
    }
}

#[wasm_bindgen]
pub fn distribution(name: &str, kmax: u32) -> Result<String, JsError> {
    distribution_json(name, kmax).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn convergence(stat: &str, power: u32, max_x: f64) -> Result<String, JsError> {
    convergence_json(stat, power, max_x as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn counts(kind: &str, k: u32, max_x: f64) -> Result<String, JsError> {
    counts_json(kind, k, max_x as u64).map_err(|e| JsError::new(&e))
}
