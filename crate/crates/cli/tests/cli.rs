use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn thetak(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thetak"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = thetak(&full);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    });
    (v, out.status.code().unwrap())
}

fn form_file(dir: &Path, text: &str) -> String {
    let p = dir.join("form.txt");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn fq_prints_cache_record_and_fills_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let form = form_file(dir.path(), "3 2 2 2 1 1 0\n");
    let (v, code) = json(&["--cache-dir", cache.to_str().unwrap(), "fq", "--form", &form, "--q", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["q"], 2);
    assert_eq!(v["coeffs"], serde_json::json!([1, -4]));
    assert_eq!(v["D"], 2);
    assert_eq!(v["ord"], 1);
    assert!(v["version"].is_string());
    let files: Vec<_> = std::fs::read_dir(&cache).unwrap().collect();
    assert_eq!(files.len(), 1);
    let (again, _) = json(&["--cache-dir", cache.to_str().unwrap(), "fq", "--form", &form, "--q", "2"]);
    assert_eq!(again, v);
}

#[test]
fn coefficients() {
    let (v, code) = json(&["coeff", "--n", "1", "--k", "12", "--t", "5"]);
    assert_eq!(code, 0);
    // 65520/691 · σ_11(5) = 65520 · 48828126 / 691
    assert_eq!(v["a"], "3199218815520/691");
    let dir = tempfile::tempdir().unwrap();
    let form = form_file(dir.path(), "3 2 2 2 1 1 0");
    let (v, _) = json(&["coeff", "--n", "3", "--k", "6", "--form", &form]);
    assert_eq!(v["a"], "-1995840/1");
    assert_eq!(v["T"], serde_json::json!([[2, 1, 1], [1, 2, 0], [1, 0, 2]]));
}

#[test]
fn json_output_is_deterministic() {
    let a = thetak(&["--json", "verify", "--theorem", "even", "--p", "23", "--t", "1", "--bound", "30"]);
    let b = thetak(&["--json", "verify", "--theorem", "even", "--p", "23", "--t", "1", "--bound", "30"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v.as_object().unwrap().keys().next().unwrap(), "version");
    assert_eq!(v["pass"], true);
    assert!(!v["evidence"].as_array().unwrap().is_empty());
}

#[test]
fn table_and_witness() {
    let (v, code) = json(&["table1"]);
    assert_eq!(code, 0);
    assert_eq!(v["records"].as_array().unwrap().len(), 18);
    assert_eq!(v["pass"], true);
    let (w, code) = json(&["witness", "--p", "17"]);
    assert_eq!(code, 0);
    assert_eq!(w["G"], serde_json::json!([[14, -2, -4], [-2, 2, 3], [-4, 3, 6]]));
    assert_eq!(w["auxiliary"]["q"], 3);
    assert_eq!(w["D"], 17);
}

#[test]
fn hermitian_commands() {
    let (v, code) = json(&["hermitian-beta", "--DK", "4", "--m", "2", "--p", "5", "--t", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["k"], 6);
    assert_eq!(v["beta"], -1);
    assert_eq!(v["factors"], serde_json::json!(["-1/252", "5/2"]));
    let (v, _) = json(&["hermitian-witness", "--gamma", "-5", "--DK", "4"]);
    assert_eq!(v["q"], 2);
    assert_eq!(v["symbols"][0]["place"], "inf");
    assert_eq!(v["symbols"][0]["value"], -1);
}

#[test]
fn exit_codes() {
    assert_eq!(thetak(&["nonsense"]).status.code(), Some(2));
    assert_eq!(thetak(&["witness", "--p", "2", "--bogus"]).status.code(), Some(2));
    assert_eq!(thetak(&["witness", "--p", "15"]).status.code(), Some(2));
    assert_eq!(thetak(&["coeff", "--n", "3", "--k", "3", "--t", "1"]).status.code(), Some(2));
    assert_eq!(thetak(&["verify", "--theorem", "main1", "--p", "5"]).status.code(), Some(0));
}
