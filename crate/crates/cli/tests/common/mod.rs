#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

pub const BIN: &str = env!("CARGO_BIN_EXE_specclust");

pub struct Output {
    pub ok: bool,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Output {
    let out = Command::new(BIN).args(args).output().expect("binary runs");
    Output {
        ok: out.status.success(),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

/// Run and parse the JSON report, asserting success and schema validity.
pub fn report<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Value {
    let out = run(args);
    assert!(out.ok, "command failed: {}", out.stderr);
    let v: Value = serde_json::from_str(&out.stdout).expect("report is JSON");
    validate(&v);
    v
}

pub fn schema_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/run_report.schema.json")
}

pub fn validate(v: &Value) {
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(schema_path()).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}");
}

pub fn gen(dir: &Path, k: usize, n: usize, d: usize, sigma: f64, seed: u64) -> (PathBuf, PathBuf) {
    let out = run(&[
        "gen".to_string(),
        format!("--k={k}"),
        format!("--n={n}"),
        format!("--d={d}"),
        format!("--sigma={sigma}"),
        format!("--seed={seed}"),
        "--out".to_string(),
        dir.display().to_string(),
    ]);
    assert!(out.ok, "{}", out.stderr);
    (dir.join("embeddings.emb1"), dir.join("labels.txt"))
}

pub fn s(p: &Path) -> String {
    p.display().to_string()
}

/// CSV text with full-precision values.
pub fn write_csv(path: &Path, rows: &[Vec<f64>]) {
    let text: String = rows
        .iter()
        .map(|r| r.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(",") + "\n")
        .collect();
    std::fs::write(path, text).unwrap();
}
