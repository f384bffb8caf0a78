//! Confronts the asymptotic main terms with exact scan data.
//!
//! The implied constants of the error terms are unknown, so checks come in
//! three kinds: exact identities between independently computed integers,
//! least-squares fits of the residual growth exponent, and bounds on scaled
//! residuals pinned in `baseline.json` from a first full run.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::constants::{compute_b1, compute_b2, gamma0, gamma1, prime_sum_mean, zeta, ConstantEstimate, OmegaDensity};
use crate::counting::{count_k_free_moebius, count_k_free_sieve, count_k_full};
use crate::distribution::Builtin;
use crate::exponents::{exponent_summary, factorize, omega_a, scan_checkpoints, segmented_scan, ExponentSequence, MomentAccumulator, ScanConfig};
use crate::{Error, Result};

/// Tolerance for every constant entering a prediction.
const PREDICTION_TOL: f64 = 1e-10;
/// First grid point of the default checkpoint grid.
pub const GRID_START: u64 = 10_000;
/// Identities that combine the scan with the counting module are checked up to here.
pub const IDENTITY_LIMIT: u64 = 1_000_000;
/// The oracle comparison runs up to here.
pub const ORACLE_LIMIT: u64 = 100_000;
/// Slack added to the claimed exponent in [`error_exponent_fit`].
pub const FIT_SLACK: f64 = 0.15;

/// `M` or `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stat {
    #[serde(rename = "M")]
    Max,
    #[serde(rename = "m")]
    Min,
}

impl Stat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "M" => Some(Self::Max),
            "m" => Some(Self::Min),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Max => "M",
            Self::Min => "m",
        }
    }
}

/// One `(x, empirical, predicted, residual, scaled_residual)` record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub x: u64,
    /// The exact integer when the empirical side is one.
    pub empirical_exact: Option<u128>,
    pub empirical: f64,
    pub predicted: f64,
    /// Certified error of `predicted` coming from the constants.
    pub predicted_error: f64,
    pub residual: f64,
    /// `residual / x^θ`.
    pub scaled_residual: f64,
}

impl ConvergenceRow {
    fn new(x: u64, empirical_exact: Option<u128>, empirical: f64, predicted: ConstantEstimate, theta: f64) -> Self {
        let residual = empirical - predicted.value;
        let scaled_residual = residual / (x as f64).powf(theta);
        Self { x, empirical_exact, empirical, predicted: predicted.value, predicted_error: predicted.error_bound, residual, scaled_residual }
    }
}

pub const ROW_HEADER: &str = "x,empirical,predicted,residual,scaled_residual";

/// CSV with the header [`ROW_HEADER`]. Floats use Rust's shortest round-trip form.
pub fn rows_to_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from(ROW_HEADER);
    out.push('\n');
    for r in rows {
        let empirical = match r.empirical_exact {
            Some(v) => v.to_string(),
            None => r.empirical.to_string(),
        };
        let _ = writeln!(out, "{},{},{},{},{}", r.x, empirical, r.predicted, r.residual, r.scaled_residual);
    }
    out
}

/// Every constant the predictions use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predictions {
    pub b1: ConstantEstimate,
    pub b2: ConstantEstimate,
    /// `γ_{0,k}` and `γ_{1,k}` for `k = 2..=5`, index `k - 2`.
    pub gamma0: Vec<ConstantEstimate>,
    pub gamma1: Vec<ConstantEstimate>,
    /// `1/ζ(k)` for `k = 2..=5`, index `k - 2`.
    pub inv_zeta: Vec<ConstantEstimate>,
}

impl Predictions {
    pub fn compute() -> Result<Self> {
        let ks = 2..=5u32;
        Ok(Self {
            b1: compute_b1(PREDICTION_TOL)?,
            b2: compute_b2(PREDICTION_TOL)?,
            gamma0: ks.clone().map(|k| gamma0(k, PREDICTION_TOL)).collect::<Result<_>>()?,
            gamma1: ks.clone().map(|k| gamma1(k, PREDICTION_TOL)).collect::<Result<_>>()?,
            inv_zeta: ks.map(|k| zeta(k as f64).map(|z| z.recip())).collect::<Result<_>>()?,
        })
    }

    fn g0(&self, k: u32) -> Result<ConstantEstimate> {
        self.gamma0.get(k as usize - 2).copied().ok_or(Error::InvalidK(k))
    }

    fn g1(&self, k: u32) -> Result<ConstantEstimate> {
        self.gamma1.get(k as usize - 2).copied().ok_or(Error::InvalidK(k))
    }

    /// Main term of `Σ_{n<=x} stat(n)^power` and the exponent `θ` of its error.
    pub fn moment_main(&self, stat: Stat, power: u32, x: u64) -> Result<(ConstantEstimate, f64)> {
        let xf = x as f64;
        let xc = ConstantEstimate::exact(xf);
        let (g02, g03, g12) = (self.g0(2)?, self.g0(3)?, self.g1(2)?);
        let sqrt = xf.sqrt();
        let cbrt = xf.cbrt();
        Ok(match (stat, power) {
            (Stat::Max, 1) => (self.b1.scale(xf), 0.5),
            (Stat::Max, 2) => (self.b2.scale(xf), 0.5),
            (Stat::Min, 1) => (xc.add(&g02.scale(sqrt)).add(&g03.add(&g12).scale(cbrt)), 0.25),
            (Stat::Min, 2) => (xc.add(&g02.scale(3.0 * sqrt)).add(&g12.scale(3.0).add(&g03.scale(5.0)).scale(cbrt)), 0.25),
            _ => return Err(Error::InvalidArgument(format!("power must be 1 or 2, got {power}"))),
        })
    }

    /// Limit of the variance-type mean and the exponent `θ` of its error.
    pub fn variance_main(&self, stat: Stat, x: u64) -> Result<(ConstantEstimate, f64)> {
        let xf = x as f64;
        Ok(match stat {
            Stat::Max => (self.b2.sub(&self.b1.square()), -0.5),
            Stat::Min => {
                let (g02, g03, g12) = (self.g0(2)?, self.g0(3)?, self.g1(2)?);
                (g02.scale(xf.powf(-0.5)).add(&g03.scale(3.0).add(&g12).scale(xf.powf(-2.0 / 3.0))), -0.75)
            }
        })
    }

    /// `γ_{0,k} x^{1/k} + γ_{1,k} x^{1/(k+1)}` with `θ = 1/(k+2)`.
    pub fn k_full_main(&self, k: u32, x: u64) -> Result<(ConstantEstimate, f64)> {
        let xf = x as f64;
        let kf = k as f64;
        let main = self.g0(k)?.scale(xf.powf(1.0 / kf)).add(&self.g1(k)?.scale(xf.powf(1.0 / (kf + 1.0))));
        Ok((main, 1.0 / (kf + 2.0)))
    }

    /// `x / ζ(k)` with `θ = 1/k`.
    pub fn k_free_main(&self, k: u32, x: u64) -> Result<(ConstantEstimate, f64)> {
        let inv = self.inv_zeta.get(k as usize - 2).copied().ok_or(Error::InvalidK(k))?;
        Ok((inv.scale(x as f64), 1.0 / k as f64))
    }
}

/// `10^4 · 2^i` below `max_x`, then `max_x` itself.
pub fn default_grid(max_x: u64) -> Vec<u64> {
    let mut grid = Vec::new();
    let mut x = GRID_START;
    while x < max_x {
        grid.push(x);
        x *= 2;
    }
    grid.push(max_x);
    grid
}

fn sums(acc: &MomentAccumulator, stat: Stat) -> (u128, u128) {
    match stat {
        Stat::Max => (acc.sum_max, acc.sum_max_sq),
        Stat::Min => (acc.sum_min, acc.sum_min_sq),
    }
}

/// Rows for `Σ stat^power` from precomputed cumulative checkpoints.
pub fn moment_rows(stat: Stat, power: u32, checkpoints: &[(u64, MomentAccumulator)], pred: &Predictions) -> Result<Vec<ConvergenceRow>> {
    checkpoints
        .iter()
        .map(|(x, acc)| {
            let (s1, s2) = sums(acc, stat);
            let empirical = if power == 1 { s1 } else { s2 };
            let (main, theta) = pred.moment_main(stat, power, *x)?;
            Ok(ConvergenceRow::new(*x, Some(empirical), empirical as f64, main, theta))
        })
        .collect()
}

/// One scan over `[1, max(xs)]` with a checkpoint at every `x` in `xs`.
pub fn moment_table(stat: Stat, power: u32, xs: &[u64], cfg: &ScanConfig) -> Result<Vec<ConvergenceRow>> {
    let checkpoints = scan_checkpoints(xs, cfg)?;
    moment_rows(stat, power, &checkpoints, &Predictions::compute()?)
}

/// `(1/x) Σ (M - B_1)²` against `B_2 - B_1²`, or `(1/x) Σ (m - 1)²` against
/// `γ_{0,2} x^{-1/2} + (3γ_{0,3} + γ_{1,2}) x^{-2/3}`.
pub fn variance_rows(stat: Stat, checkpoints: &[(u64, MomentAccumulator)], pred: &Predictions) -> Result<Vec<ConvergenceRow>> {
    checkpoints
        .iter()
        .map(|(x, acc)| {
            let xf = *x as f64;
            let (s1, s2) = sums(acc, stat);
            let (main, theta) = pred.variance_main(stat, *x)?;
            let row = match stat {
                Stat::Max => {
                    let b1 = pred.b1.value;
                    let emp = s2 as f64 / xf - 2.0 * b1 * (s1 as f64 / xf) + b1 * b1;
                    ConvergenceRow::new(*x, None, emp, main, theta)
                }
                Stat::Min => {
                    // Σ (m - 1)² = Σ m² - 2 Σ m + x exactly
                    let numerator = s2 + *x as u128 - 2 * s1;
                    ConvergenceRow::new(*x, None, numerator as f64 / xf, main, theta)
                }
            };
            Ok(row)
        })
        .collect()
}

pub fn variance_table(stat: Stat, xs: &[u64], cfg: &ScanConfig) -> Result<Vec<ConvergenceRow>> {
    let checkpoints = scan_checkpoints(xs, cfg)?;
    variance_rows(stat, &checkpoints, &Predictions::compute()?)
}

/// Empirical `P_x(stat = k)` against the limiting law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub k: u32,
    pub count: u64,
    pub empirical: f64,
    pub limit: f64,
    pub residual: f64,
}

pub const DISTRIBUTION_HEADER: &str = "k,count,empirical,limit,residual";

pub fn distribution_rows_to_csv(rows: &[DistributionRow]) -> String {
    let mut out = String::from(DISTRIBUTION_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.k, r.count, r.empirical, r.limit, r.residual);
    }
    out
}

/// The limit is the `f_1` law for `M` and the point mass at 1 for `m`.
pub fn distribution_rows(stat: Stat, acc: &MomentAccumulator, k_max: u32) -> Result<Vec<DistributionRow>> {
    if k_max < 1 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let (hist, law) = match stat {
        Stat::Max => (&acc.hist_max, Builtin::F1.distribution()?),
        Stat::Min => (&acc.hist_min, Builtin::Degenerate.distribution()?),
    };
    let x = acc.count as f64;
    Ok((1..=k_max)
        .map(|k| {
            let count = hist.get(k as usize).copied().unwrap_or(0);
            let empirical = count as f64 / x;
            let limit = law.pmf(k as u64);
            DistributionRow { k, count, empirical, limit, residual: empirical - limit }
        })
        .collect())
}

pub fn value_distribution_table(stat: Stat, x: u64, k_max: u32, cfg: &ScanConfig) -> Result<Vec<DistributionRow>> {
    let acc = crate::exponents::scan_moments(1, x, cfg)?;
    distribution_rows(stat, &acc, k_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountTableKind {
    KFree,
    KFull,
}

/// Exact counts against `x/ζ(k)` (k-free) or `γ_{0,k} x^{1/k} + γ_{1,k} x^{1/(k+1)}` (k-full).
pub fn count_rows(kind: CountTableKind, k: u32, xs: &[u64], pred: &Predictions) -> Result<Vec<ConvergenceRow>> {
    xs.iter()
        .map(|&x| {
            let (count, (main, theta)) = match kind {
                CountTableKind::KFree => (count_k_free_moebius(x, k)?.count, pred.k_free_main(k, x)?),
                CountTableKind::KFull => (count_k_full(x, k)?.count, pred.k_full_main(k, x)?),
            };
            Ok(ConvergenceRow::new(x, Some(count as u128), count as f64, main, theta))
        })
        .collect()
}

pub fn count_table(kind: CountTableKind, k: u32, xs: &[u64]) -> Result<Vec<ConvergenceRow>> {
    count_rows(kind, k, xs, &Predictions::compute()?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub claimed: f64,
    pub fitted_slope: f64,
    pub points: usize,
    pub pass: bool,
}

/// Least-squares slope of `log |residual|` against `log x`.
///
/// Rows whose residual is zero or below ten times the prediction's certified
/// error are dropped; at least 4 rows spanning 3 decades must remain.
pub fn error_exponent_fit(rows: &[ConvergenceRow], claimed: f64) -> Result<ExponentFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.residual != 0.0 && r.residual.abs() >= 10.0 * r.predicted_error)
        .map(|r| ((r.x as f64).ln(), r.residual.abs().ln()))
        .collect();
    let span = match (pts.iter().map(|p| p.0).reduce(f64::min), pts.iter().map(|p| p.0).reduce(f64::max)) {
        (Some(lo), Some(hi)) => (hi - lo) / std::f64::consts::LN_10,
        _ => 0.0,
    };
    if pts.len() < 4 || span < 3.0 - 1e-9 {
        return Err(Error::InsufficientPoints { needed: 4, decades: 3, got: pts.len() });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    Ok(ExponentFit { claimed, fitted_slope: slope, points: pts.len(), pass: slope <= claimed + FIT_SLACK })
}

/// Bounds pinned from the first full run to `10^8`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    /// `max |Σm - main| / x^{1/4}` over the grid.
    pub min_first_scaled: f64,
    /// `max |Σm² - main| / x^{1/4}` over the grid.
    pub min_second_scaled: f64,
    /// `max |N_k(x) - main| / x^{1/(k+2)}`, `k = 2, 3`.
    pub k_full_scaled: [f64; 2],
    /// `max |S_k(x) - x/ζ(k)| / x^{1/k}`, `k = 2, 3`.
    pub k_free_scaled: [f64; 2],
    /// `c` in `P_x(m = 1) >= 1 - c x^{-1/2}`.
    pub degenerate_constant: f64,
}

impl Baseline {
    pub fn pinned() -> Self {
        serde_json::from_str(include_str!("../baseline.json")).expect("baseline.json is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    Moments,
    Counts,
    Distribution,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "all" => Some(Self::All),
            "moments" => Some(Self::Moments),
            "counts" => Some(Self::Counts),
            "distribution" => Some(Self::Distribution),
            _ => None,
        }
    }

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Not enough data at this `max_x`; does not fail the suite.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        let status = if pass { Status::Pass } else { Status::Fail };
        Self { name: name.into(), pass, status, detail }
    }

    fn skipped(name: &str, detail: String) -> Self {
        Self { name: name.into(), pass: true, status: Status::Skipped, detail }
    }

    fn from_fit(name: &str, fit: Result<ExponentFit>) -> Self {
        match fit {
            Ok(f) => Self::new(name, f.pass, format!("slope {:.4} against claimed {} + {FIT_SLACK} over {} points", f.fitted_slope, f.claimed, f.points)),
            Err(e) => Self::skipped(name, e.to_string()),
        }
    }
}

/// Deterministic suite output: no timings, no environment details.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub max_x: u64,
    pub grid: Vec<u64>,
    pub pass: bool,
    pub checks: Vec<Check>,
}

/// Scan and trial division agree on `M`, `m`, `ω_2..ω_6` and `ω_S, ω_E, ω_O` for `n <= limit`.
pub fn oracle_check(limit: u64, cfg: &ScanConfig) -> Result<Option<u64>> {
    let ks = [2, 3, 4, 5, 6];
    let cfg = cfg.clone().with_omega_ks(&ks);
    let mut first_bad = None;
    segmented_scan(1, limit, &cfg, |s| {
        if first_bad.is_some() {
            return;
        }
        let sig = factorize(s.n).expect("n >= 1");
        let expected = exponent_summary(&sig, &ks);
        let seqs_ok = [ExponentSequence::S, ExponentSequence::E, ExponentSequence::O].iter().all(|&q| s.omega_a(q) == Some(omega_a(&sig, q)));
        if *s != expected || !seqs_ok {
            first_bad = Some(s.n);
        }
    })?;
    Ok(first_bad)
}

/// Smallest `j` with `2^j >= x`.
fn log2_ceil(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// `Σ m² = x + Σ_{k=2}^{j} (2k-1) N_k(x) + 1 - j²`, `2^j >= x`.
pub fn min_square_identity(x: u64) -> Result<u128> {
    let j = log2_ceil(x).max(1);
    let mut total = x as i128 + 1 - (j as i128) * (j as i128);
    for k in 2..=j {
        total += (2 * k as i128 - 1) * count_k_full(x, k)?.count as i128;
    }
    Ok(total as u128)
}

/// `Σ m = x + Σ_{k=2}^{j} N_k(x) + 1 - j`.
pub fn min_first_identity(x: u64) -> Result<u128> {
    let j = log2_ceil(x).max(1);
    let mut total = x as i128 + 1 - j as i128;
    for k in 2..=j {
        total += count_k_full(x, k)?.count as i128;
    }
    Ok(total as u128)
}

/// `Σ M² = j² x - Σ_{k=2}^{j} (2k-1) S_k(x)`.
pub fn max_square_identity(x: u64) -> Result<u128> {
    let j = log2_ceil(x).max(1) as i128;
    let mut total = j * j * x as i128;
    for k in 2..=j as u32 {
        total -= (2 * k as i128 - 1) * count_k_free_moebius(x, k)?.count as i128;
    }
    Ok(total as u128)
}

/// `Σ M = j x - Σ_{k=2}^{j} S_k(x)`.
pub fn max_first_identity(x: u64) -> Result<u128> {
    let j = log2_ceil(x).max(1) as i128;
    let mut total = j * x as i128;
    for k in 2..=j as u32 {
        total -= count_k_free_moebius(x, k)?.count as i128;
    }
    Ok(total as u128)
}

/// Histogram complementarity: `#{M = 1} = S_2`, `#{M = k-1} = S_k - S_{k-1}`,
/// `#{m >= k} = N_k - 1` for `k >= 2`.
fn histogram_counts_match(x: u64, acc: &MomentAccumulator) -> Result<bool> {
    let j = log2_ceil(x).max(2);
    let mut prev_free = 0u64;
    for k in 2..=j + 1 {
        let free = count_k_free_moebius(x, k)?.count;
        let expected = if k == 2 { free } else { free - prev_free };
        if acc.hist_max[k as usize - 1] != expected {
            return Ok(false);
        }
        prev_free = free;
        let above: u64 = acc.hist_min[k as usize..].iter().sum();
        if above != count_k_full(x, k)?.count - 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn max_abs_scaled(rows: &[ConvergenceRow]) -> f64 {
    rows.iter().filter(|r| r.x >= GRID_START).map(|r| r.scaled_residual.abs()).fold(0.0, f64::max)
}

fn bounded_check(name: &str, rows: &[ConvergenceRow], bound: f64) -> Check {
    let worst = max_abs_scaled(rows);
    Check::new(name, worst <= bound, format!("max |scaled residual| {worst:.6} against pinned {bound}"))
}

/// Runs the requested checks on `[1, max_x]` over [`default_grid`].
pub fn run_suite(suite: Suite, max_x: u64, cfg: &ScanConfig) -> Result<SuiteReport> {
    if max_x == 0 {
        return Err(Error::ZeroArgument);
    }
    let grid = default_grid(max_x);
    let pred = Predictions::compute()?;
    let baseline = Baseline::pinned();
    let needs_scan = suite.includes(Suite::Moments) || suite.includes(Suite::Distribution);
    let checkpoints = if needs_scan { scan_checkpoints(&grid, cfg)? } else { Vec::new() };
    let mut checks = Vec::new();
    if suite.includes(Suite::Moments) {
        moment_checks(&mut checks, &checkpoints, &pred, &baseline, cfg)?;
    }
    if suite.includes(Suite::Counts) {
        count_checks(&mut checks, &grid, &pred, &baseline)?;
    }
    if suite.includes(Suite::Distribution) {
        distribution_checks(&mut checks, &checkpoints, &pred, &baseline)?;
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(SuiteReport { suite, max_x, grid, pass, checks })
}

fn moment_checks(checks: &mut Vec<Check>, cps: &[(u64, MomentAccumulator)], pred: &Predictions, baseline: &Baseline, cfg: &ScanConfig) -> Result<()> {
    let limit = ORACLE_LIMIT.min(cps.last().map_or(1, |c| c.0));
    let bad = oracle_check(limit, cfg)?;
    checks.push(Check::new("oracle_equivalence", bad.is_none(), match bad {
        None => format!("all n <= {limit} agree"),
        Some(n) => format!("first mismatch at n = {n}"),
    }));

    let (x_top, top) = cps.last().map(|(x, a)| (*x, a)).expect("grid is never empty");
    let hist_ok = [Stat::Max, Stat::Min].iter().all(|&s| {
        let (s1, s2) = sums(top, s);
        let hist = if s == Stat::Max { &top.hist_max } else { &top.hist_min };
        MomentAccumulator::histogram_sum(hist, 1) == s1 && MomentAccumulator::histogram_sum(hist, 2) == s2
    });
    checks.push(Check::new("histogram_sums", hist_ok, format!("x = {x_top}")));

    let mut identity_ok = true;
    let mut histogram_ok = true;
    let mut checked = Vec::new();
    for (x, acc) in cps.iter().filter(|c| c.0 <= IDENTITY_LIMIT) {
        identity_ok &= min_square_identity(*x)? == acc.sum_min_sq && min_first_identity(*x)? == acc.sum_min;
        identity_ok &= max_square_identity(*x)? == acc.sum_max_sq && max_first_identity(*x)? == acc.sum_max;
        histogram_ok &= histogram_counts_match(*x, acc)?;
        checked.push(*x);
    }
    checks.push(Check::new("count_identities", identity_ok, format!("sums of M, M², m, m² from k-free and k-full counts at {} grid points", checked.len())));
    checks.push(Check::new("histogram_complementarity", histogram_ok, format!("value counts from count differences at {} grid points", checked.len())));

    let m1 = moment_rows(Stat::Max, 1, cps, pred)?;
    let ratio = m1.last().map_or(0.0, |r| r.empirical / r.x as f64);
    let gap = (ratio - pred.b1.value).abs();
    checks.push(Check::new("mean_M", gap <= 5e-3, format!("|ΣM/x - B1| = {gap:.3e} at x = {x_top}")));
    checks.push(Check::from_fit("mean_M_exponent", error_exponent_fit(&m1, 0.5)));

    let m2 = moment_rows(Stat::Max, 2, cps, pred)?;
    let ratio = m2.last().map_or(0.0, |r| r.empirical / r.x as f64);
    let gap = (ratio - pred.b2.value).abs();
    checks.push(Check::new("second_moment_M", gap <= 2e-2, format!("|ΣM²/x - B2| = {gap:.3e} at x = {x_top}")));
    checks.push(Check::from_fit("second_moment_M_exponent", error_exponent_fit(&m2, 0.5)));

    let var = variance_rows(Stat::Max, cps, pred)?;
    let gap = var.last().map_or(f64::INFINITY, |r| r.residual.abs());
    checks.push(Check::new("variance_M", gap <= 2e-2, format!("|var - (B2 - B1²)| = {gap:.3e} at x = {x_top}")));

    let n1 = moment_rows(Stat::Min, 1, cps, pred)?;
    checks.push(bounded_check("mean_m_scaled", &n1, baseline.min_first_scaled));
    let n2 = moment_rows(Stat::Min, 2, cps, pred)?;
    checks.push(bounded_check("second_moment_m_scaled", &n2, baseline.min_second_scaled));
    checks.push(Check::from_fit("second_moment_m_exponent", error_exponent_fit(&n2, 0.25)));

    let var_m = variance_rows(Stat::Min, cps, pred)?;
    let positive = var_m.iter().all(|r| r.empirical > 0.0);
    let decreasing = var_m.windows(2).all(|w| w[1].empirical < w[0].empirical);
    checks.push(Check::new("variance_m_decreasing", positive && decreasing, format!("{} grid points", var_m.len())));
    Ok(())
}

fn count_checks(checks: &mut Vec<Check>, grid: &[u64], pred: &Predictions, baseline: &Baseline) -> Result<()> {
    let mut agree = true;
    for &x in grid.iter().filter(|&&x| x <= IDENTITY_LIMIT) {
        for k in 2..=5 {
            agree &= count_k_free_sieve(x, k)?.count == count_k_free_moebius(x, k)?.count;
        }
    }
    checks.push(Check::new("k_free_methods_agree", agree, format!("sieve and Möbius for k = 2..5 at grid x <= {IDENTITY_LIMIT}")));

    let (mut free, mut full) = (0, 0);
    for n in 1..=100u64 {
        let sig = factorize(n)?;
        free += u64::from(sig.exponents().all(|e| e < 2));
        full += u64::from(sig.exponents().all(|e| e >= 2));
    }
    let small_ok = free == 61 && full == 14 && count_k_free_sieve(100, 2)?.count == free && count_k_full(100, 2)?.count == full;
    checks.push(Check::new("small_counts", small_ok, format!("S_2(100) = {free}, N_2(100) = {full}")));

    for (i, k) in [2u32, 3].into_iter().enumerate() {
        let rows = count_rows(CountTableKind::KFull, k, grid, pred)?;
        checks.push(bounded_check(&format!("k_full_{k}_scaled"), &rows, baseline.k_full_scaled[i]));
        let rows = count_rows(CountTableKind::KFree, k, grid, pred)?;
        checks.push(bounded_check(&format!("k_free_{k}_scaled"), &rows, baseline.k_free_scaled[i]));
    }
    Ok(())
}

fn distribution_checks(checks: &mut Vec<Check>, cps: &[(u64, MomentAccumulator)], pred: &Predictions, baseline: &Baseline) -> Result<()> {
    let (x_top, top) = cps.last().map(|(x, a)| (*x, a)).expect("grid is never empty");
    let rows = distribution_rows(Stat::Max, top, 4)?;
    let worst = rows.iter().map(|r| r.residual.abs()).fold(0.0, f64::max);
    checks.push(Check::new("limit_law_M", worst <= 2e-3, format!("max |P_x(M = k) - pmf(k)| = {worst:.3e}, k = 1..4, x = {x_top}")));

    let c = baseline.degenerate_constant;
    let degenerate_ok = cps.iter().filter(|(x, _)| *x >= GRID_START).all(|(x, acc)| acc.hist_min[1] as f64 / *x as f64 >= 1.0 - c / (*x as f64).sqrt());
    checks.push(Check::new("limit_law_m", degenerate_ok, format!("P_x(m = 1) >= 1 - {c} x^(-1/2) on the grid")));

    let f1 = Builtin::F1.distribution()?;
    let mean = f1.mean_closed(1e-10)?;
    let second = f1.second_moment_closed(1e-10)?;
    let ok = mean.agrees_with(&pred.b1) && second.agrees_with(&pred.b2) && mean.error_bound + pred.b1.error_bound <= 1e-8;
    checks.push(Check::new("f1_moments", ok, format!("mean {} vs B1 {}, second {} vs B2 {}", mean.value, pred.b1.value, second.value, pred.b2.value)));

    let benford = Builtin::F0(10).distribution()?;
    let closed = benford.mean_closed(1e-12)?;
    let direct = benford.mean_direct(None, 1e-12)?;
    checks.push(Check::new("benford_mean", closed.agrees_with(&direct), format!("closed {} direct {}", closed.value, direct.value)));

    let density = OmegaDensity::new(ExponentSequence::Indicator(2), 1e-7)?;
    let mass = density.total_mass();
    let mean = density.first_moment();
    let prime_sum = prime_sum_mean(2, 1e-7)?;
    let ok = mass.contains(1.0) && mean.agrees_with(&prime_sum) && mean.error_bound + prime_sum.error_bound <= 1e-6;
    checks.push(Check::new("e_2m_sums", ok, format!("Σ e = {}, Σ m e = {} vs Σ (p-1)/p³ = {}", mass.value, mean.value, prime_sum.value)));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(x: u64, residual: f64) -> ConvergenceRow {
        ConvergenceRow { x, empirical_exact: None, empirical: residual, predicted: 0.0, predicted_error: 0.0, residual, scaled_residual: 0.0 }
    }

    #[test]
    fn synthetic_fits() {
        let xs: [f64; 5] = [1e4, 1e5, 1e6, 1e7, 1e8];
        let steep: Vec<_> = xs.iter().map(|&x| row(x as u64, x.powf(0.9))).collect();
        let fit = error_exponent_fit(&steep, 0.5).unwrap();
        assert!(!fit.pass && (fit.fitted_slope - 0.9).abs() < 1e-9);
        let flat: Vec<_> = xs.iter().map(|&x| row(x as u64, -x.powf(0.3))).collect();
        assert!(error_exponent_fit(&flat, 0.5).unwrap().pass);
        let few: Vec<_> = xs[..3].iter().map(|&x| row(x as u64, x)).collect();
        assert!(matches!(error_exponent_fit(&few, 0.5), Err(Error::InsufficientPoints { .. })));
        let narrow: Vec<_> = (0..6).map(|i| row(10_000 * (i + 1), 1.0)).collect();
        assert!(error_exponent_fit(&narrow, 0.5).is_err());
    }

    #[test]
    fn identities_hold_exactly() {
        let cfg = ScanConfig::default();
        for x in [1u64, 2, 3, 4, 5, 8, 100, 1023, 1024, 1025, 65_536, 200_000] {
            let acc = crate::exponents::scan_moments(1, x, &cfg).unwrap();
            assert_eq!(min_square_identity(x).unwrap(), acc.sum_min_sq, "x={x}");
            assert_eq!(min_first_identity(x).unwrap(), acc.sum_min, "x={x}");
            assert_eq!(max_square_identity(x).unwrap(), acc.sum_max_sq, "x={x}");
            assert_eq!(max_first_identity(x).unwrap(), acc.sum_max, "x={x}");
            assert!(histogram_counts_match(x, &acc).unwrap(), "x={x}");
        }
    }

    #[test]
    fn first_moment_of_m_at_one_million_matches_oracle() {
        let xs = [1_000_000];
        let rows = moment_table(Stat::Max, 1, &xs, &ScanConfig::default()).unwrap();
        let brute: u128 = (1..=1_000_000u64).map(|n| factorize(n).unwrap().exponents().max().unwrap_or(1) as u128).sum();
        assert_eq!(rows[0].empirical_exact, Some(brute));
    }

    #[test]
    fn small_count_row() {
        let pred = Predictions::compute().unwrap();
        let rows = count_rows(CountTableKind::KFull, 2, &[1, 100], &pred).unwrap();
        assert_eq!(rows[0].empirical_exact, Some(1));
        assert_eq!(rows[1].empirical_exact, Some(14));
        let expected = 2.173_254_312_519_554 * 10.0 - 1.487_950_663_532_272_6 * 100f64.cbrt();
        assert!((rows[1].predicted - expected).abs() < 1e-9);
        let rows = count_rows(CountTableKind::KFree, 2, &[1], &pred).unwrap();
        assert_eq!(rows[0].empirical_exact, Some(1));
    }

    #[test]
    fn grid_shape() {
        assert_eq!(default_grid(50_000), [10_000, 20_000, 40_000, 50_000]);
        assert_eq!(default_grid(40_000), [10_000, 20_000, 40_000]);
        assert_eq!(default_grid(10), [10]);
        let g = default_grid(100_000_000);
        assert_eq!(g.len(), 15);
        assert_eq!(*g.last().unwrap(), 100_000_000);
    }

    #[test]
    fn csv_header_and_rows() {
        let r = ConvergenceRow::new(100, Some(14), 14.0, ConstantEstimate::exact(12.5), 0.5);
        let csv = rows_to_csv(&[r]);
        assert_eq!(csv, "x,empirical,predicted,residual,scaled_residual\n100,14,12.5,1.5,0.15\n");
    }

    #[test]
    fn log2_ceil_values() {
        assert_eq!([1, 2, 3, 4, 5, 1024, 1025].map(log2_ceil), [0, 1, 2, 2, 3, 10, 11]);
    }

    #[test]
    fn small_suite_passes_and_is_deterministic() {
        let a = run_suite(Suite::All, 200_000, &ScanConfig::default()).unwrap();
        assert!(a.pass, "{a:#?}");
        let b = run_suite(Suite::All, 200_000, &ScanConfig::default().with_workers(3).with_segment_len(4096)).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
