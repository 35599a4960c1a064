use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyliouville")).args(args).output().expect("binary runs")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn constants_for_order_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["constants", "--m", "2", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("constants.csv")).unwrap();
    assert!(csv.contains("\r\n"));
    let lines: Vec<&str> = csv.split("\r\n").filter(|l| !l.is_empty()).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("m,omega,lambda"));
    let cells: Vec<f64> = lines[1].split(',').map(|c| c.parse().unwrap()).collect();
    let pi = std::f64::consts::PI;
    assert_eq!(cells[0], 2.0);
    assert!((cells[2] - 64.0 * pi * pi).abs() < 1e-9);
    assert_eq!(cells[3], 64.0);
    assert_eq!(cells[7], 24.0);
    let json = read_json(&dir.path().join("constants.json"));
    assert_eq!(json[0]["exact"]["lambda"], "64·π^2");

    let manifest = read_json(&dir.path().join("manifest.json"));
    for key in ["command", "resolved_config", "files", "wall_time_s", "versions"] {
        assert!(manifest.get(key).is_some(), "{key}");
    }
    assert_eq!(manifest["command"], "constants");
    assert_eq!(manifest["resolved_config"]["constants"]["orders"], serde_json::json!([2]));
    let files: Vec<&str> = manifest["files"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(files, ["constants.csv", "constants.json"]);
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"problem": {"domain": {"kind": "unit_ball"}, "k": 1, "epsilon": 0.1}}"#).unwrap();
    let o = run(&["green", "--config", cfg.to_str().unwrap(), "--out", out]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("epsilon"));
    assert_eq!(run(&["phi", "--preset", "no-such-preset", "--out", out]).status.code(), Some(1));
    assert_eq!(run(&["phi", "--bogus-flag", "--out", out]).status.code(), Some(1));
    // needs a problem section
    assert_eq!(run(&["phi", "--out", out]).status.code(), Some(1));
    // reduction is planar only
    assert_eq!(run(&["solve", "--preset", "ball4-k1", "--out", out]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn spectra_table_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"spectra": {"kernel_boxes": []}}"#).unwrap();
    let o = run(&["spectra", "--config", cfg.to_str().unwrap(), "--m-max", "3", "--k-max", "4", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = read_json(&dir.path().join("spectrum.json"));
    assert_eq!(s["matches_only_at_k1"], true);
    assert_eq!(s["table"].as_array().unwrap().len(), 15);
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert!(csv.starts_with("m,k,lambda,product,t_m,matches\r\n"));
}

#[test]
fn solve_is_deterministic_for_fixed_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = run(&["solve", "--preset", "disc-k1", "--seed", "7", "--eps", "0.04", "--out", d.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let manifest = read_json(&a.path().join("manifest.json"));
    assert_eq!(manifest["resolved_config"]["seed"], 7);
    assert_eq!(manifest["resolved_config"]["problem"]["eps"], 0.04);
    for f in manifest["files"].as_array().unwrap() {
        let f = f.as_str().unwrap();
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
    let sol = read_json(&a.path().join("solution.json"));
    assert_eq!(sol["accepted"], true);
}

#[test]
fn numeric_failure_writes_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", "--preset", "disc-k2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let d = read_json(&dir.path().join("diagnostic.json"));
    assert_eq!(d["command"], "solve");
    assert_eq!(d["details"]["kind"], "NoCriticalPoint");
    let manifest = read_json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["exit_code"], 2);
}

#[test]
fn residual_and_energy_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["residual", "--preset", "ball4-k1", "--eps-sweep", "0.2,0.1,0.05", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&dir.path().join("residual.json"));
    assert_eq!(r["sweep"].as_array().unwrap().len(), 3);
    assert!(dir.path().join("ansatz_profile.csv").exists());
    let o = run(&["energy", "--preset", "disc-k1", "--eps-sweep", "0.1,0.05,0.025", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("energy.csv")).unwrap();
    assert!(csv.starts_with("eps,J,phi_k,residual,slope"));
    let e = read_json(&dir.path().join("energy.json"));
    assert!(e["sweep"]["slope"].as_f64().unwrap() > 1.8);
}

#[test]
fn linking_mountain_pass_outputs_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{
          "problem": {
            "domain": {"kind": "unit_ball"}, "k": 1,
            "potential": {"kind": "bumps", "base": 1.0, "bumps": [
              {"amplitude": 2.0, "center": [0.4, 0.0], "width": 0.15},
              {"amplitude": 2.0, "center": [-0.4, 0.0], "width": 0.15}]}
          },
          "linking": {"mode": "minimum"}
        }"#,
    )
    .unwrap();
    let o = run(&["linking", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let c = read_json(&dir.path().join("critical_point.json"));
    assert_eq!(c["outcome"], "holds");
    assert!(dir.path().join("path.csv").exists());
}
