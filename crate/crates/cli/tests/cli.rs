use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lipsharp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lipsharp"))
        .args(args)
        .arg("--out")
        .arg(dir.join("out"))
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    path.display().to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn construct_default_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = lipsharp(dir.path(), &["construct"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = read_json(&dir.path().join("out/manifest.json"));
    assert_eq!(m["schema_version"], 1);
    assert_eq!(m["j"], serde_json::json!([0, 9, 90, 819]));
    assert_eq!(m["relaxed"], false);
    assert_eq!(m["measure"][1]["exact"], "221/64");
    assert_eq!(m["generation_counts"][1], "226304");
}

#[test]
fn construct_relaxed_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "r.json", r#"{"j": [0, 4, 9], "l": [2, 6], "mode": "relaxed"}"#);
    let out = lipsharp(dir.path(), &["construct", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let m = read_json(&dir.path().join("out/manifest.json"));
    assert_eq!(m["relaxed"], true);
    assert_eq!(m["children_per_cube"], serde_json::json!(["80", "320"]));
    assert!(m["validation"]["skipped"].as_array().unwrap().iter().any(|s| s == "growth inequality"));
}

#[test]
fn malformed_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    for (i, bad) in [r#"{"j": [0, "nine"]}"#, r#"{"j": [0, 4, 9]}"#, r#"{"schema_version": 9}"#, "not json"]
        .iter()
        .enumerate()
    {
        let cfg = write_config(dir.path(), &format!("bad{i}.json"), bad);
        let out = lipsharp(dir.path(), &["construct", "--config", &cfg]);
        assert_eq!(out.status.code(), Some(2), "{bad}");
    }
    let out = lipsharp(dir.path(), &["construct", "--config", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_parameters_list_violations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"l": [2, 37, 334]}"#);
    let out = lipsharp(dir.path(), &["construct", "--config", &cfg]);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("growth inequality"));
}

#[test]
fn verify_default_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = lipsharp(dir.path(), &["verify", "--seed", "11"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = read_json(&dir.path().join("out/verify.json"));
    assert_eq!(v["passed"], true);
    assert!(v["checks_run"].as_u64().unwrap() > 10);
}

#[test]
fn verify_reports_corrupted_l() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"l": [2, 37, 334]}"#);
    let out = lipsharp(dir.path(), &["verify", "--config", &cfg, "--suites", "params"]);
    assert_eq!(out.status.code(), Some(1));
    let v = read_json(&dir.path().join("out/verify.json"));
    assert!(v["failed"].as_array().unwrap().iter().any(|f| f == "growth inequality"));
}

#[test]
fn verify_empty_selection_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "e.json", r#"{"suites": []}"#);
    let out = lipsharp(dir.path(), &["verify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let v = read_json(&dir.path().join("out/verify.json"));
    assert_eq!(v["checks_run"], 0);
    assert_eq!(v["flag"], "no suites selected");
    let out = lipsharp(dir.path(), &["verify", "--suites", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn probe_writes_csv_and_caps_depth() {
    let dir = tempfile::tempdir().unwrap();
    let out = lipsharp(dir.path(), &["probe", "--chain", "root", "--depth", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("capped"));
    let text = std::fs::read_to_string(dir.path().join("out/probe.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("chain_id,level,radius_exp,lip_bound"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.contains(",true,")));
}

#[test]
fn probe_is_reproducible_with_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = lipsharp(d.path(), &["probe", "--seed", "5", "--depth", "1"]);
        assert_eq!(out.status.code(), Some(0));
    }
    let read = |d: &tempfile::TempDir| std::fs::read_to_string(d.path().join("out/probe.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn probe_rejects_unselected_chain() {
    let dir = tempfile::tempdir().unwrap();
    let out = lipsharp(dir.path(), &["probe", "--chain", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "r.json", r#"{"j": [0, 4, 9], "l": [2, 6], "mode": "relaxed"}"#);
    let out = lipsharp(dir.path(), &["plot", "layout", "witness", "lip", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let layout = std::fs::read_to_string(dir.path().join("out/layout_level0.svg")).unwrap();
    assert!(layout.starts_with("<svg"));
    // outer cube, 80 children, inner cube
    assert_eq!(layout.matches("<rect").count(), 1 + 1 + 80 + 1);
    assert!(dir.path().join("out/witness_ratio.svg").exists());

    let empty = tempfile::tempdir().unwrap();
    let out = lipsharp(empty.path(), &["plot"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!empty.path().join("out").exists());

    let cfg3 = write_config(dir.path(), "d3.json", r#"{"dim": 3}"#);
    let out = lipsharp(dir.path(), &["plot", "layout", "--config", &cfg3]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gradcheck_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "g.json",
        r#"{"gradcheck": {"curves": 4, "segments": 256, "grid_nodes": 33, "pairs": 500}}"#,
    );
    let out = lipsharp(dir.path(), &["gradcheck", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = read_json(&dir.path().join("out/gradcheck.json"));
    assert_eq!(r["chaining"]["all_hold"], true);
    assert_eq!(r["hajlasz"]["passes_at_min_c"], true);

    // the exported field can be fed back in
    let field = dir.path().join("out/lip_field.csv").display().to_string();
    let out = lipsharp(dir.path(), &["gradcheck", "--config", &cfg, "--field", &field]);
    assert_eq!(out.status.code(), Some(0));
}
