//! `maxexp`: constants, scans, counts, distributions and the verification suite.
//!
//! Exit codes: 0 success, 1 failed check or computation, 2 usage error.

mod scan;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use maxexp::constants::ConstantsReport;
use maxexp::counting::{count_k_free_moebius, count_k_free_sieve, count_k_full};
use maxexp::verify::{run_suite, Stat, Suite, GRID_START};
use maxexp::{Builtin, ConstantEstimate, ScanConfig};
use serde::Serialize;

/// Largest `x` any command accepts.
const MAX_X_LIMIT: u64 = 10_000_000_000;

#[derive(Parser, Debug)]
#[command(name = "maxexp", version, about = "Maximal and minimal exponents in prime factorizations")]
struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for scans.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=1024))]
    workers: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Moment constants, zeta-product constants and e_{k,m} with certified errors.
    Constants {
        #[arg(long, default_value = "1e-9", value_parser = parse_tol)]
        tol: f64,
    },
    /// Exact moment sums of M and m against their predicted main terms.
    Scan(ScanArgs),
    /// Exact count of k-free or k-full integers up to x.
    Counts {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, value_parser = parse_k)]
        k: u32,
        #[arg(long, value_parser = parse_x)]
        x: u64,
        #[arg(long, value_enum)]
        method: Option<CountMethodArg>,
    },
    /// Table, moments and samples of an arithmetic-f distribution.
    Dist {
        /// f1, f0:N, f2k:K, fA:S, fA:E, fA:O or degenerate.
        #[arg(long = "f", value_parser = parse_builtin)]
        f: Builtin,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..=100_000))]
        kmax: u64,
        #[arg(long)]
        moments: bool,
        #[arg(long, default_value = "1e-9", value_parser = parse_tol)]
        tol: f64,
        #[arg(long, requires = "seed", value_parser = clap::value_parser!(u64).range(1..=10_000_000))]
        sample: Option<u64>,
        #[arg(long, requires = "sample")]
        seed: Option<u64>,
    },
    /// Run the verification suite.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, value_parser = parse_x)]
        max_x: u64,
    },
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long, value_parser = parse_x)]
    pub max_x: u64,
    #[arg(long, value_delimiter = ',', default_value = "M,m", value_parser = parse_stat)]
    pub stats: Vec<Stat>,
    #[arg(long, value_delimiter = ',', default_value = "1,2", value_parser = clap::value_parser!(u32).range(1..=2))]
    pub powers: Vec<u32>,
    /// `geometric`, `final`, or a comma-separated increasing list.
    #[arg(long, default_value = "geometric")]
    pub checkpoints: String,
    /// JSON file holding the accumulator state; an existing file is resumed.
    #[arg(long)]
    pub checkpoint_file: Option<PathBuf>,
    /// Integers scanned between writes of the checkpoint file.
    #[arg(long, default_value = "1e7", value_parser = parse_x)]
    pub checkpoint_every: u64,
    /// Stop after this many chunks, leaving the checkpoint file behind.
    #[arg(long, hide = true)]
    pub stop_after: Option<u64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Kfree,
    Kfull,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum CountMethodArg {
    Sieve,
    Moebius,
    Enumeration,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    All,
    Moments,
    Counts,
    Distribution,
}

/// A parsed but unusable combination of flags.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Integers, also in exponent form such as `1e6`.
fn parse_x(s: &str) -> Result<u64, String> {
    let v = match s.parse::<u64>() {
        Ok(v) => v,
        Err(_) => {
            let f: f64 = s.parse().map_err(|_| format!("`{s}` is not a positive integer"))?;
            if !(f.is_finite() && f.fract() == 0.0 && (1.0..=9.007_199_254_740_992e15).contains(&f)) {
                return Err(format!("`{s}` is not a positive integer"));
            }
            f as u64
        }
    };
    if v == 0 {
        return Err("must be at least 1".into());
    }
    if v > MAX_X_LIMIT {
        return Err(format!("must be at most {MAX_X_LIMIT}"));
    }
    Ok(v)
}

fn parse_tol(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t.is_finite() && t > 0.0 && t < 1.0 => Ok(t),
        _ => Err(format!("`{s}` is not a tolerance in (0, 1)")),
    }
}

fn parse_k(s: &str) -> Result<u32, String> {
    match s.parse::<u32>() {
        Ok(k) if (2..=63).contains(&k) => Ok(k),
        _ => Err(format!("`{s}` is not an integer in 2..=63")),
    }
}

fn parse_stat(s: &str) -> Result<Stat, String> {
    Stat::parse(s).ok_or_else(|| format!("`{s}` is not M or m"))
}

fn parse_builtin(s: &str) -> Result<Builtin, String> {
    s.parse::<Builtin>().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let rendered = e.to_string();
            let line: Vec<&str> = rendered.lines().map(str::trim).take_while(|l| !l.starts_with("Usage:")).filter(|l| !l.is_empty()).collect();
            eprintln!("{}", line.join(" ").trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

pub struct Output {
    pub text: String,
    pub pass: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, pass: true }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn run(cli: &Cli) -> Result<Output> {
    let cfg = ScanConfig::default().with_workers(cli.workers as usize);
    match &cli.command {
        Command::Constants { tol } => constants(*tol, cli.format.unwrap_or(Format::Json)),
        Command::Scan(args) => scan::run(args, &cfg, cli.format.unwrap_or(Format::Csv) == Format::Json),
        Command::Counts { kind, k, x, method } => counts(*kind, *k, *x, *method, cli.format.unwrap_or(Format::Csv)),
        Command::Dist { f, kmax, moments, tol, sample, seed } => {
            let sample = sample.zip(*seed);
            dist(*f, *kmax, *moments, *tol, sample, cli.format.unwrap_or(Format::Csv))
        }
        Command::Verify { suite, max_x } => verify(*suite, *max_x, &cfg, cli.format.unwrap_or(Format::Json)),
    }
}

/// Decimal places warranted by `tol`.
fn decimals(tol: f64) -> usize {
    (-tol.log10()).ceil().clamp(0.0, 17.0) as usize
}

fn estimate_line(out: &mut String, name: &str, e: &ConstantEstimate, places: usize) {
    let method = serde_json::to_value(e.method).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
    let _ = writeln!(out, "{name},{:.places$},{:e},{method}", e.value, e.error_bound);
}

fn constants(tol: f64, format: Format) -> Result<Output> {
    let report = ConstantsReport::compute(tol)?;
    if format == Format::Json {
        return Ok(Output::ok(to_json(&report)?));
    }
    let places = decimals(tol);
    let mut out = String::from("name,value,error_bound,method\n");
    estimate_line(&mut out, "B1", &report.b1, places);
    estimate_line(&mut out, "B2", &report.b2, places);
    estimate_line(&mut out, "varM", &report.var_m, places);
    for (k, g) in &report.gamma0_k {
        estimate_line(&mut out, &format!("gamma0_{k}"), g, places);
    }
    for (k, g) in &report.gamma1_k {
        estimate_line(&mut out, &format!("gamma1_{k}"), g, places);
    }
    let e_places = decimals(report.e_tol);
    for (k, row) in &report.e_km {
        for (m, e) in row.iter().enumerate() {
            estimate_line(&mut out, &format!("e_{k}_{m}"), e, e_places);
        }
    }
    Ok(Output::ok(out))
}

#[derive(Serialize)]
struct CountsOutput {
    kind: &'static str,
    k: u32,
    x: u64,
    method: &'static str,
    count: u64,
}

fn counts(kind: Kind, k: u32, x: u64, method: Option<CountMethodArg>, format: Format) -> Result<Output> {
    let (kind_name, method) = match (kind, method) {
        (Kind::Kfree, None | Some(CountMethodArg::Sieve)) => ("kfree", CountMethodArg::Sieve),
        (Kind::Kfree, Some(CountMethodArg::Moebius)) => ("kfree", CountMethodArg::Moebius),
        (Kind::Kfull, None | Some(CountMethodArg::Enumeration)) => ("kfull", CountMethodArg::Enumeration),
        (Kind::Kfree, Some(CountMethodArg::Enumeration)) => return Err(usage("k-free counts use --method sieve or moebius")),
        (Kind::Kfull, Some(_)) => return Err(usage("k-full counts use --method enumeration")),
    };
    let (report, method_name) = match method {
        CountMethodArg::Sieve => (count_k_free_sieve(x, k)?, "sieve"),
        CountMethodArg::Moebius => (count_k_free_moebius(x, k)?, "moebius"),
        CountMethodArg::Enumeration => (count_k_full(x, k)?, "enumeration"),
    };
    let row = CountsOutput { kind: kind_name, k, x, method: method_name, count: report.count };
    let text = match format {
        Format::Json => to_json(&row)?,
        Format::Csv => format!("kind,k,x,method,count\n{},{},{},{},{}\n", row.kind, row.k, row.x, row.method, row.count),
    };
    Ok(Output::ok(text))
}

#[derive(Serialize)]
struct DistRow {
    k: u64,
    pmf: f64,
    cdf: f64,
}

#[derive(Serialize)]
struct Moments {
    tol: f64,
    mean_closed: ConstantEstimate,
    mean_direct: ConstantEstimate,
    second_moment_closed: ConstantEstimate,
    second_moment_direct: ConstantEstimate,
    variance: ConstantEstimate,
}

#[derive(Serialize)]
struct Sample {
    seed: u64,
    values: Vec<u64>,
}

#[derive(Serialize)]
struct DistOutput {
    f: String,
    kmax: u64,
    table: Vec<DistRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    moments: Option<Moments>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sample: Option<Sample>,
}

fn dist(f: Builtin, kmax: u64, with_moments: bool, tol: f64, sample: Option<(u64, u64)>, format: Format) -> Result<Output> {
    let d = f.distribution()?;
    let table = (1..=kmax).map(|k| DistRow { k, pmf: d.pmf(k), cdf: d.cdf(k) }).collect();
    let moments = if with_moments {
        Some(Moments {
            tol,
            mean_closed: d.mean_closed(tol)?,
            mean_direct: d.mean_direct(None, tol)?,
            second_moment_closed: d.second_moment_closed(tol)?,
            second_moment_direct: d.second_moment_direct(None, tol)?,
            variance: d.variance(tol)?,
        })
    } else {
        None
    };
    let sample = sample.map(|(count, seed)| Sample { seed, values: d.sample(seed, count as usize) });
    let output = DistOutput { f: f.to_string(), kmax, table, moments, sample };
    if format == Format::Json {
        return Ok(Output::ok(to_json(&output)?));
    }
    let mut out = String::from("k,pmf,cdf\n");
    for r in &output.table {
        let _ = writeln!(out, "{},{},{}", r.k, r.pmf, r.cdf);
    }
    if let Some(m) = &output.moments {
        out.push_str("\nquantity,value,error_bound\n");
        for (name, e) in [
            ("mean_closed", &m.mean_closed),
            ("mean_direct", &m.mean_direct),
            ("second_moment_closed", &m.second_moment_closed),
            ("second_moment_direct", &m.second_moment_direct),
            ("variance", &m.variance),
        ] {
            let _ = writeln!(out, "{name},{},{:e}", e.value, e.error_bound);
        }
    }
    if let Some(s) = &output.sample {
        out.push_str("\nindex,value\n");
        for (i, v) in s.values.iter().enumerate() {
            let _ = writeln!(out, "{i},{v}");
        }
    }
    Ok(Output::ok(out))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn verify(suite: SuiteArg, max_x: u64, cfg: &ScanConfig, format: Format) -> Result<Output> {
    let suite = match suite {
        SuiteArg::All => Suite::All,
        SuiteArg::Moments => Suite::Moments,
        SuiteArg::Counts => Suite::Counts,
        SuiteArg::Distribution => Suite::Distribution,
    };
    if max_x < GRID_START {
        return Err(usage(format!("verify needs --max-x of at least {GRID_START}")));
    }
    let report = run_suite(suite, max_x, cfg)?;
    let text = match format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut out = String::from("name,status,pass,detail\n");
            for c in &report.checks {
                let status = serde_json::to_value(c.status)?.as_str().unwrap_or_default().to_string();
                let _ = writeln!(out, "{},{status},{},{}", c.name, c.pass, csv_field(&c.detail));
            }
            out
        }
    };
    Ok(Output { text, pass: report.pass })
}
