//! `maxexp scan` with resumable checkpoint files.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use maxexp::exponents::scan_moments;
use maxexp::verify::{default_grid, moment_rows, rows_to_csv, ConvergenceRow, Predictions, Stat, ROW_HEADER};
use maxexp::{MomentAccumulator, ScanConfig};
use serde::{Deserialize, Serialize};

use crate::{to_json, usage, Output, ScanArgs};

const STATE_VERSION: u32 = 1;

/// Everything needed to continue an interrupted scan.
#[derive(Debug, Serialize, Deserialize)]
struct ScanState {
    version: u32,
    max_x: u64,
    checkpoints: Vec<u64>,
    /// Every `n <= scanned_to` is folded into `running`.
    scanned_to: u64,
    running: MomentAccumulator,
    reached: Vec<(u64, MomentAccumulator)>,
}

impl ScanState {
    fn fresh(max_x: u64, checkpoints: Vec<u64>) -> Self {
        Self { version: STATE_VERSION, max_x, checkpoints, scanned_to: 0, running: MomentAccumulator::default(), reached: Vec::new() }
    }

    fn load(path: &Path, max_x: u64, checkpoints: &[u64]) -> Result<Option<Self>> {
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let state: Self = serde_json::from_str(&text).map_err(|e| usage(format!("{} is not a scan checkpoint: {e}", path.display())))?;
        if state.version != STATE_VERSION || state.max_x != max_x || state.checkpoints != checkpoints {
            return Err(usage(format!("{} belongs to a different scan", path.display())));
        }
        Ok(Some(state))
    }

    /// Written to a sibling file first so a crash never leaves a torn state.
    fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_string(self)?).with_context(|| format!("writing {}", tmp.display()))?;
        fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

fn parse_checkpoints(arg: &str, max_x: u64) -> Result<Vec<u64>> {
    match arg {
        "geometric" => Ok(default_grid(max_x)),
        "final" => Ok(vec![max_x]),
        list => {
            let mut xs = Vec::new();
            for part in list.split(',') {
                let x = crate::parse_x(part.trim()).map_err(|e| usage(format!("invalid checkpoint `{part}`: {e}")))?;
                xs.push(x);
            }
            if xs.windows(2).any(|w| w[0] >= w[1]) || xs.last().is_some_and(|&x| x > max_x) {
                return Err(usage("checkpoints must increase strictly and stay within --max-x"));
            }
            if xs.last() != Some(&max_x) {
                xs.push(max_x);
            }
            Ok(xs)
        }
    }
}

#[derive(Serialize)]
struct Table {
    stat: Stat,
    power: u32,
    rows: Vec<ConvergenceRow>,
}

#[derive(Serialize)]
struct ScanOutput {
    max_x: u64,
    checkpoints: Vec<u64>,
    tables: Vec<Table>,
}

pub fn run(args: &ScanArgs, cfg: &ScanConfig, json: bool) -> Result<Output> {
    let checkpoints = parse_checkpoints(&args.checkpoints, args.max_x)?;
    let file = args.checkpoint_file.as_deref();
    let mut state = match file {
        Some(path) => ScanState::load(path, args.max_x, &checkpoints)?,
        None => None,
    }
    .unwrap_or_else(|| ScanState::fresh(args.max_x, checkpoints.clone()));

    let mut chunks = 0u64;
    while state.scanned_to < args.max_x {
        if args.stop_after.is_some_and(|n| chunks >= n) {
            eprintln!("stopped at x = {}", state.scanned_to);
            return Ok(Output::ok(String::new()));
        }
        let lo = state.scanned_to + 1;
        let next_cp = checkpoints.iter().copied().find(|&c| c >= lo).unwrap_or(args.max_x);
        let hi = next_cp.min(state.scanned_to.saturating_add(args.checkpoint_every));
        state.running.merge(&scan_moments(lo, hi, cfg)?);
        state.scanned_to = hi;
        if hi == next_cp {
            state.reached.push((hi, state.running.clone()));
        }
        if let Some(path) = file {
            state.save(path)?;
        }
        chunks += 1;
    }

    let pred = Predictions::compute()?;
    let mut tables = Vec::new();
    for &stat in &args.stats {
        for &power in &args.powers {
            tables.push(Table { stat, power, rows: moment_rows(stat, power, &state.reached, &pred)? });
        }
    }
    if json {
        return Ok(Output::ok(to_json(&ScanOutput { max_x: args.max_x, checkpoints, tables })?));
    }
    if let [only] = tables.as_slice() {
        return Ok(Output::ok(rows_to_csv(&only.rows)));
    }
    let mut out = format!("stat,power,{ROW_HEADER}\n");
    for t in &tables {
        for line in rows_to_csv(&t.rows).lines().skip(1) {
            out.push_str(&format!("{},{},{line}\n", t.stat.label(), t.power));
        }
    }
    Ok(Output::ok(out))
}
