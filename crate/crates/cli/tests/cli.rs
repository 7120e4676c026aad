use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use grover_core::files::{write_matrix, write_state};
use grover_core::generators::{haar_unitary, random_state};

fn grover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grover")).args(args).output().expect("spawn grover")
}

fn stdout_ok(args: &[&str]) -> String {
    let out = grover(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Data rows of a CSV artifact as column-name lookups.
fn csv_rows(text: &str) -> Vec<Vec<(String, String)>> {
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_owned).collect();
    lines
        .map(|l| header.iter().cloned().zip(l.split(',').map(str::to_owned)).collect())
        .collect()
}

fn field<'a>(row: &'a [(String, String)], name: &str) -> &'a str {
    &row.iter().find(|(k, _)| k == name).unwrap().1
}

#[test]
fn run_classic_search_trace() {
    let out = grover(&["run", "--n", "1024", "--targets", "idx:0", "--unitary", "walsh-hadamard", "--gamma", "basis:0", "--iterations", "auto-paper", "--record-full"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 26);
    let last = rows.last().unwrap();
    assert_eq!(field(last, "m"), "25");
    let p: f64 = field(last, "p_full").parse().unwrap();
    assert!(p >= 0.999);
    let summary = String::from_utf8(out.stderr).unwrap();
    assert!(summary.contains("m=25"), "{summary}");
}

#[test]
fn run_json_carries_metadata() {
    let text = stdout_ok(&["run", "--n", "64", "--targets", "count:2@1", "--unitary", "haar:3", "--format", "json", "--measure-seed", "9"]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["metadata"]["tool"], "grover");
    assert_eq!(doc["metadata"]["config"]["unitary"], "haar:3");
    assert_eq!(doc["metadata"]["config"]["targets"], "count:2@1");
    assert!(doc["metadata"]["rng"].as_str().unwrap().contains("ChaCha8"));
    let m = doc["summary"]["iterations"].as_u64().unwrap() as usize;
    assert_eq!(doc["rows"].as_array().unwrap().len(), m + 1);
    assert!(doc["summary"]["measurement"]["index"].is_u64());
}

#[test]
fn exit_codes() {
    assert_eq!(grover(&["run", "--n", "2", "--targets", "idx:0,1"]).status.code(), Some(2));
    assert_eq!(grover(&["run", "--n", "6", "--targets", "idx:0", "--unitary", "walsh-hadamard"]).status.code(), Some(1));
    assert_eq!(grover(&["run", "--n", "4", "--targets", "idx:4"]).status.code(), Some(1));
    assert_eq!(grover(&["run", "--n", "4", "--targets", "idx:0", "--unitary", "file:/nonexistent.json"]).status.code(), Some(1));
}

#[test]
fn sweep_over_dimension_matches_quarter_pi_rule() {
    let text = stdout_ok(&["sweep", "--targets", "idx:0", "--sweep-n", "64,256,1024,4096"]);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 4);
    for (row, n) in rows.iter().zip([64.0f64, 256.0, 1024.0, 4096.0]) {
        let m: f64 = field(row, "m_paper").parse().unwrap();
        assert_eq!(m, (PI * n.sqrt() / 4.0).round(), "N={n}");
        assert_eq!(field(row, "verdict"), "Proceed");
    }
}

#[test]
fn sweep_over_target_count_reports_overlap() {
    let text = stdout_ok(&["sweep", "--n", "256", "--sweep-targets", "1,2,4,8"]);
    let rows = csv_rows(&text);
    for (row, l) in rows.iter().zip([1.0f64, 2.0, 4.0, 8.0]) {
        let a: f64 = field(row, "a").parse().unwrap();
        assert!((a - 2.0 * (l / 256.0).sqrt()).abs() <= 1e-13, "l={l}: a={a}");
        assert_eq!(field(row, "l"), format!("{l}"));
    }
}

#[test]
fn sweep_over_haar_seeds_keeps_reduced_model_exact() {
    let text = stdout_ok(&["sweep", "--n", "128", "--targets", "count:3@0", "--unitary", "haar:0", "--gamma", "random:1", "--sweep-seeds", "0..9", "--workers", "3"]);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 10);
    for row in &rows {
        let d: f64 = field(row, "max_deviation").parse().unwrap();
        assert!(d <= 1e-9, "deviation {d}");
    }
}

#[test]
fn seed_sweep_needs_haar_base() {
    let out = grover(&["sweep", "--n", "16", "--targets", "idx:0", "--sweep-seeds", "0..3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"n": 256, "targets": "idx:3,77", "unitary": "haar:5", "gamma": "random:2", "iterations": 7, "record_full": true}"#,
    )
    .unwrap();
    let from_file = stdout_ok(&["run", "--config", cfg.to_str().unwrap()]);
    let from_flags = stdout_ok(&["run", "--n", "256", "--targets", "idx:3,77", "--unitary", "haar:5", "--gamma", "random:2", "--iterations", "7", "--record-full"]);
    assert_eq!(from_file, from_flags);
    assert_eq!(csv_rows(&from_file).len(), 8);

    std::fs::write(&cfg, r#"{"n": 16, "targets": "idx:0", "colour": "red"}"#).unwrap();
    assert_eq!(grover(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn sweep_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    std::fs::write(&cfg, r#"{"base": {"n": 64, "targets": "count:1@0"}, "axis": {"target_count": [1, 4]}}"#).unwrap();
    let rows = csv_rows(&stdout_ok(&["sweep", "--config", cfg.to_str().unwrap()]));
    assert_eq!(rows.len(), 2);
    assert_eq!(field(&rows[1], "l"), "4");
}

fn write_inputs(dir: &Path, n: usize) -> (String, String) {
    let u = dir.join("u.json");
    let g = dir.join("g.json");
    write_matrix(&u, &haar_unitary(n, 21)).unwrap();
    write_state(&g, &random_state(n, 22).unwrap()).unwrap();
    (format!("file:{}", u.display()), format!("file:{}", g.display()))
}

#[test]
fn file_inputs_reproduce_generated_ones() {
    let dir = tempfile::tempdir().unwrap();
    let (u, g) = write_inputs(dir.path(), 32);
    let common = ["run", "--n", "32", "--targets", "idx:1,9", "--iterations", "6", "--record-full"];
    let from_files = stdout_ok(&[&common[..], &["--unitary", &u, "--gamma", &g]].concat());
    let generated = stdout_ok(&[&common[..], &["--unitary", "haar:21", "--gamma", "random:22"]].concat());
    assert_eq!(from_files, generated);
}

#[test]
fn file_input_dimension_mismatch_fails() {
    let dir = tempfile::tempdir().unwrap();
    let (u, _) = write_inputs(dir.path(), 8);
    assert_eq!(grover(&["run", "--n", "16", "--targets", "idx:0", "--unitary", &u]).status.code(), Some(1));
}

#[test]
fn validate_reports_every_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.txt");
    let status = grover(&["validate", "--scope", "thm23", "--seed", "1", "--problems", "10", "--out", out.to_str().unwrap()]);
    assert_eq!(status.status.code(), Some(0));
    let report = std::fs::read_to_string(out).unwrap();
    assert!(report.lines().filter(|l| l.starts_with("PASS")).count() >= 4, "{report}");
    assert!(!report.contains("FAIL"));
}
