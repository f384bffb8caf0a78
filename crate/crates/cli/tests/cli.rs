use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn maxexp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxexp")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn assert_valid(schema_file: &str, doc: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(schema_file);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema_file}: {errors:?}");
}

fn json_of(args: &[&str]) -> Value {
    let out = maxexp(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn constants_json_matches_schema_and_values() {
    let doc = json_of(&["constants", "--tol", "1e-9"]);
    assert_valid("constants.schema.json", &doc);
    let b1 = doc["B1"]["value"].as_f64().unwrap();
    assert_eq!(format!("{b1:.9}"), "1.705211140");
    assert!(doc["B1"]["error_bound"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn constants_csv_prints_at_requested_precision() {
    let out = stdout(&maxexp(&["constants", "--tol", "1e-9", "--format", "csv"]));
    assert!(out.lines().any(|l| l.starts_with("B1,1.705211140,")), "{out}");
    assert!(out.lines().any(|l| l.starts_with("B2,4.301302400,")), "{out}");
    assert!(out.lines().any(|l| l.starts_with("varM,1.393557368,")), "{out}");
}

#[test]
fn counts_square_full_up_to_100() {
    let out = maxexp(&["counts", "--kind", "kfull", "--k", "2", "--x", "100"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "kind,k,x,method,count\nkfull,2,100,enumeration,14\n");
    let doc = json_of(&["counts", "--kind", "kfree", "--k", "2", "--x", "100", "--format", "json"]);
    assert_valid("counts.schema.json", &doc);
    assert_eq!(doc["count"], 61);
}

#[test]
fn k_free_methods_print_the_same_count() {
    let a = json_of(&["counts", "--kind", "kfree", "--k", "3", "--x", "1e6", "--method", "sieve", "--format", "json"]);
    let b = json_of(&["counts", "--kind", "kfree", "--k", "3", "--x", "1e6", "--method", "moebius", "--format", "json"]);
    assert_eq!(a["count"], b["count"]);
}

#[test]
fn dist_f1_table() {
    let out = stdout(&maxexp(&["dist", "--f", "f1", "--kmax", "5"]));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("k,pmf,cdf"));
    let first = lines.next().unwrap();
    assert!(first.starts_with("1,0.6079271"), "{first}");
    assert_eq!(lines.count(), 4);
}

#[test]
fn dist_json_with_moments_and_sample() {
    let doc = json_of(&["dist", "--f", "f0:10", "--moments", "--sample", "50", "--seed", "7", "--format", "json"]);
    assert_valid("dist.schema.json", &doc);
    let mean = doc["moments"]["mean_closed"]["value"].as_f64().unwrap();
    let expected = 1.0 + (2..=9).map(|k| 1.0 - (k as f64).ln() / 10f64.ln()).sum::<f64>();
    assert!((mean - expected).abs() < 1e-12);
    assert_eq!(doc["sample"]["values"].as_array().unwrap().len(), 50);
    let again = json_of(&["dist", "--f", "f0:10", "--moments", "--sample", "50", "--seed", "7", "--format", "json"]);
    assert_eq!(doc, again);
}

#[test]
fn every_builtin_name_is_accepted() {
    for f in ["f1", "f0:10", "f2k:2", "fA:S", "fA:E", "fA:O", "degenerate"] {
        let out = maxexp(&["dist", "--f", f, "--kmax", "3"]);
        assert_eq!(out.status.code(), Some(0), "{f}");
    }
}

#[test]
fn usage_errors_exit_2_with_one_line() {
    let cases: &[&[&str]] = &[
        &["counts", "--kind", "kfull", "--k", "1", "--x", "100"],
        &["counts", "--kind", "kfree", "--k", "2", "--x", "0"],
        &["counts", "--kind", "kfree", "--k", "2", "--x", "100", "--method", "enumeration"],
        &["verify", "--max-x", "1.5e3"],
        &["verify", "--max-x", "2.5e4x"],
        &["verify", "--max-x", "1e11"],
        &["constants", "--tol", "-1"],
        &["dist", "--f", "f7"],
        &["dist", "--f", "f1", "--sample", "3"],
        &["scan", "--max-x", "1000", "--stats", "Q"],
        &["scan", "--max-x", "1000", "--checkpoints", "500,400"],
        &["scan", "--max-x", "1000", "--workers", "0"],
        &["frobnicate"],
    ];
    for args in cases {
        let out = maxexp(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.trim_end().lines().count(), 1, "{args:?}: {err}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn scan_csv_single_table_has_exact_columns() {
    let out = stdout(&maxexp(&["scan", "--max-x", "1e5", "--stats", "M", "--powers", "1"]));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("x,empirical,predicted,residual,scaled_residual"));
    assert_eq!(lines.last().unwrap().split(',').next(), Some("100000"));
}

#[test]
fn scan_json_matches_schema() {
    let doc = json_of(&["scan", "--max-x", "50000", "--format", "json"]);
    assert_valid("scan.schema.json", &doc);
    assert_eq!(doc["tables"].as_array().unwrap().len(), 4);
}

#[test]
fn interrupted_scan_resumes_to_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("state.json");
    let file = file.to_str().unwrap();
    let base = ["scan", "--max-x", "300000", "--checkpoint-every", "25000"];

    let whole = maxexp(&base);
    assert_eq!(whole.status.code(), Some(0));

    let mut partial = base.to_vec();
    partial.extend(["--checkpoint-file", file, "--stop-after", "5"]);
    let stopped = maxexp(&partial);
    assert_eq!(stopped.status.code(), Some(0));
    assert!(stopped.stdout.is_empty());
    let state: Value = serde_json::from_str(&std::fs::read_to_string(file).unwrap()).unwrap();
    // chunks also end at every grid point: 10000, 20000, 40000, 65000, 80000
    assert_eq!(state["scanned_to"], 80_000);

    let mut resume = base.to_vec();
    resume.extend(["--checkpoint-file", file, "--workers", "3"]);
    let resumed = maxexp(&resume);
    assert_eq!(resumed.status.code(), Some(0));
    assert_eq!(resumed.stdout, whole.stdout);

    let other = maxexp(&["scan", "--max-x", "400000", "--checkpoint-file", file]);
    assert_eq!(other.status.code(), Some(2));
}

#[test]
fn verify_small_suite_passes_with_valid_report() {
    let out = maxexp(&["verify", "--suite", "counts", "--max-x", "1e5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_valid("verify.schema.json", &doc);
    assert_eq!(doc["pass"], true);
    let csv = stdout(&maxexp(&["verify", "--suite", "counts", "--max-x", "1e5", "--format", "csv"]));
    assert!(csv.starts_with("name,status,pass,detail\n"));
}

#[test]
fn identical_config_gives_identical_bytes() {
    let args = ["verify", "--suite", "distribution", "--max-x", "2e5", "--workers", "2"];
    assert_eq!(maxexp(&args).stdout, maxexp(&args).stdout);
}
