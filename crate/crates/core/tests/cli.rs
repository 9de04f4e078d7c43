//! End-to-end runs of the `spin-transistor` binary: outputs and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spin-transistor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spin-transistor-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn circuit_map_writes_report_and_passes_checks() {
    let out = scratch("map");
    let cfg = configs().join("circuit_map.json");
    let o = bin(&["circuit-map", "--config", s(&cfg), "--out", s(&out), "--check"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("[PASS]") && !stdout.contains("[FAIL]"), "{stdout}");
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("circuit_map.json")).unwrap()).unwrap();
    assert!(report["ratios"]["ej2_over_ec2"].as_f64().unwrap() > 20.0);
    let csv = fs::read_to_string(out.join("crosstalk.csv")).unwrap();
    assert!(csv.starts_with("c_r_multiplier,j4_over_j2,j4_over_jz"));
    fs::remove_dir_all(out).unwrap();
}

const SCENARIO: &str = r#"{
  "scenarios": [
    {
      "name": "short_open",
      "model": "circuit",
      "gate": "open",
      "initial_left": [{ "r": 0.0, "theta": 0.0 }, { "r": 1.0, "theta": 3.14159 }],
      "grid": { "t0": "0 us", "t1": "0.2 us", "n_points": 51 }
    }
  ],
  "checks": [
    { "metric": "min_fidelity_until", "scenario": "short_open", "t": "0.2 us", "at_least": 0.5 }
  ]
}"#;

#[test]
fn threshold_violation_sets_exit_code_only_with_check() {
    let out = scratch("scenario");
    let cfg = out.join("scenario.json");
    // the open gate starts far from the transfer target, so the check fails
    fs::write(&cfg, SCENARIO).unwrap();
    let checked = bin(&["scenario", "--config", s(&cfg), "--out", s(&out), "--format", "both", "--check"]);
    assert_eq!(checked.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&checked.stdout).contains("[FAIL]"));
    for f in ["short_open.csv", "short_open_band.csv", "short_open.svg"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let unchecked = bin(&["scenario", "--config", s(&cfg), "--out", s(&out), "--format", "csv"]);
    assert_eq!(unchecked.status.code(), Some(0));
    fs::remove_dir_all(out).unwrap();
}

#[test]
fn bad_input_is_reported_with_exit_code_two() {
    let out = scratch("bad");
    let missing = bin(&["scenario", "--out", s(&out)]);
    assert_eq!(missing.status.code(), Some(2));
    let cfg = out.join("broken.json");
    fs::write(&cfg, r#"{ "scenarios": [{ "name": "x", "model": "circuit", "gate": "open", "grid": { "t0": "0 us", "t1": "1 GHz", "n_points": 3 } }] }"#).unwrap();
    let o = bin(&["scenario", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    fs::remove_dir_all(out).unwrap();
}

#[test]
fn resonant_config_passes_its_checks() {
    let out = scratch("resonant");
    let o = bin(&["scenario", "--config", s(&configs().join("resonant_open.json")), "--out", s(&out), "--format", "csv", "--check"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    fs::remove_dir_all(out).unwrap();
}
