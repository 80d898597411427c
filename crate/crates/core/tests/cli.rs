use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn doa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_doa"))
        .args(args)
        .output()
        .expect("run doa")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn scenario(dir: &Path, name: &str, geometry: &str, freqs: &str, powers: &str, snapshots: usize, sigma: f64) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(
        &path,
        format!(
            r#"{{
  "geometry": {geometry},
  "scenario": {{
    "freqs": {freqs},
    "powers": {powers},
    "noise_variance": {sigma},
    "snapshots": {snapshots},
    "seed": 3
  }}
}}"#
        ),
    )
    .unwrap();
    path
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn simulate(dir: &Path, cfg: &Path, out: &str) -> std::path::PathBuf {
    let out = dir.join(out);
    let o = doa(&["simulate", "--config", p(cfg), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn simulate_writes_snapshots_and_truth() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(dir.path(), "s.json", r#"{"kind": "ula", "m": 5}"#, "[0.1, -0.2]", "[1, 2]", 7, 0.01);
    let out = simulate(dir.path(), &cfg, "a");
    let csv = fs::read_to_string(out.join("snapshots.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 5 * 7);
    let truth = json(&out.join("truth.json"));
    assert_eq!(truth["scenario"]["freqs"], serde_json::json!([0.1, -0.2]));
    assert_eq!(truth["scenario"]["noise_variance"], serde_json::json!(0.01));

    let again = simulate(dir.path(), &cfg, "b");
    assert_eq!(fs::read(out.join("snapshots.csv")).unwrap(), fs::read(again.join("snapshots.csv")).unwrap());

    let other = dir.path().join("c");
    let o = doa(&["simulate", "--config", p(&cfg), "--seed", "99", "--out", p(&other)]);
    assert_eq!(o.status.code(), Some(0));
    assert_ne!(fs::read(out.join("snapshots.csv")).unwrap(), fs::read(other.join("snapshots.csv")).unwrap());
    assert_eq!(json(&other.join("truth.json"))["scenario"]["seed"], 99);
}

#[test]
fn zero_source_scenario_is_noise_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(dir.path(), "s.json", r#"{"kind": "ula", "m": 4}"#, "[]", "[]", 3, 1.0);
    let out = simulate(dir.path(), &cfg, "a");
    assert_eq!(json(&out.join("truth.json"))["scenario"]["freqs"], serde_json::json!([]));
    let csv = fs::read_to_string(out.join("snapshots.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 12);
    assert!(csv.lines().skip(1).any(|l| !l.ends_with(",0,0")));
}

#[test]
fn bad_config_reports_line_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, "{\n  \"geometry\": {\"kind\": \"ula\", \"m\": 4},\n  \"scenario\": {\"freqs\": [0.1], \"powers\": [1], \"snapshots\": 2}\n}\n").unwrap();
    let o = doa(&["simulate", "--config", p(&cfg), "--out", p(&dir.path().join("x"))]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3") && err.contains("noise_variance"), "{err}");
    let o = doa(&["simulate", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn estimate_anm_on_sla_reports_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(dir.path(), "s.json", r#"{"kind": "sla", "n": 10, "omega": [1, 2, 4, 7, 10]}"#, "[0.1, 0.4]", "[1, 1]", 4, 0.0);
    let data = simulate(dir.path(), &cfg, "d");
    let out = dir.path().join("e");
    let o = doa(&["estimate", p(&data), "--method", "anm", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = json(&out.join("spectrum.json"));
    assert_eq!(rep["method"], "anm");
    assert!(rep["primal_residual"].as_f64().unwrap() >= 0.0);
    assert!(rep["dual_residual"].is_number());
    let freqs: Vec<f64> = serde_json::from_value(rep["freqs"].clone()).unwrap();
    assert_eq!(freqs.len(), 2);
    assert!((freqs[0] - 0.1).abs() < 1e-3 && (freqs[1] - 0.4).abs() < 1e-3, "{freqs:?}");
}

#[test]
fn gls_schema_does_not_depend_on_snapshot_count() {
    let dir = tempfile::tempdir().unwrap();
    let keys = |l: usize| -> Vec<String> {
        let cfg = scenario(dir.path(), &format!("s{l}.json"), r#"{"kind": "ula", "m": 6}"#, "[0.1, 0.35]", "[1, 1]", l, 0.0);
        let data = simulate(dir.path(), &cfg, &format!("d{l}"));
        let out = dir.path().join(format!("e{l}"));
        let o = doa(&["estimate", p(&data), "--method", "gls", "--out", p(&out)]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let mut k: Vec<String> = json(&out.join("spectrum.json")).as_object().unwrap().keys().cloned().collect();
        k.sort();
        k
    };
    assert_eq!(keys(1), keys(5));
}

#[test]
fn music_without_order_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(dir.path(), "s.json", r#"{"kind": "ula", "m": 6}"#, "[0.1]", "[1]", 10, 0.1);
    let data = simulate(dir.path(), &cfg, "d");
    let out = dir.path().join("e");
    let o = doa(&["estimate", p(&data), "--method", "music", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--order K or --auto-order"));
    let o = doa(&["estimate", p(&data), "--method", "music", "--auto-order", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&out.join("spectrum.json"))["order"], 1);
}

#[test]
fn unsupported_pair_lists_valid_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(dir.path(), "s.json", r#"{"kind": "sla", "n": 10, "omega": [1, 2, 10]}"#, "[0.1]", "[1]", 4, 0.0);
    let data = simulate(dir.path(), &cfg, "d");
    let o = doa(&["estimate", p(&data), "--method", "esprit", "--order", "1", "--out", p(&dir.path().join("e"))]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("valid pairs") && err.contains("planar: none"), "{err}");
    let o = doa(&["estimate", p(&data), "--method", "root-music", "--out", p(&dir.path().join("e"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unconverged_solver_exits_3_with_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(dir.path(), "s.json", r#"{"kind": "ula", "m": 6}"#, "[0.1, 0.3]", "[1, 1]", 3, 0.01);
    let data = simulate(dir.path(), &cfg, "d");
    let params = dir.path().join("params.json");
    fs::write(&params, r#"{"max_iters": 2}"#).unwrap();
    let out = dir.path().join("e");
    let o = doa(&["estimate", p(&data), "--method", "anm", "--config", p(&params), "--lambda", "0.1", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = json(&out.join("spectrum.json"));
    assert_eq!(rep["converged"], false);
    assert_eq!(rep["iterations"], 2);
}

#[test]
fn decompose_recovers_atoms() {
    let dir = tempfile::tempdir().unwrap();
    // First row u_j = Σ p_k e^{−i2π f_k j} for f = (0.1, −0.25), p = (2, 1).
    let u: Vec<[f64; 2]> = (0..6)
        .map(|j| {
            let (a, b) = (2.0 * std::f64::consts::PI * 0.1 * j as f64, -2.0 * std::f64::consts::PI * 0.25 * j as f64);
            [2.0 * a.cos() + b.cos(), -2.0 * a.sin() - b.sin()]
        })
        .collect();
    let cfg = dir.path().join("u.json");
    fs::write(&cfg, serde_json::json!({ "u": u }).to_string()).unwrap();
    let out = dir.path().join("o");
    let o = doa(&["decompose", "--config", p(&cfg), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let spec = json(&out.join("spectrum.json"));
    let f: Vec<f64> = serde_json::from_value(spec["freqs"].clone()).unwrap();
    let pw: Vec<f64> = serde_json::from_value(spec["powers"].clone()).unwrap();
    assert!((f[0] + 0.25).abs() < 1e-9 && (f[1] - 0.1).abs() < 1e-9, "{f:?}");
    assert!((pw[0] - 1.0).abs() < 1e-8 && (pw[1] - 2.0).abs() < 1e-8, "{pw:?}");
}

#[test]
fn bench_is_reproducible_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bench.json");
    fs::write(
        &cfg,
        r#"{
  "geometry": {"kind": "ula", "m": 6},
  "sources": 2,
  "snr_db": [20, 10],
  "snapshots": [5],
  "separation": [1.5],
  "methods": [{"name": "esprit"}, {"name": "music"}],
  "trials": 50,
  "seed": 1,
  "success_threshold": 0.2
}"#,
    )
    .unwrap();
    let run = |out: &str, extra: &[&str]| -> std::path::PathBuf {
        let out = dir.path().join(out);
        let mut args = vec!["bench", "--config", p(&cfg), "--out", p(&out), "--trials", "3"];
        args.extend_from_slice(extra);
        let o = doa(&args);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let a = run("a", &[]);
    let b = run("b", &[]);
    let ra = fs::read(a.join("results.csv")).unwrap();
    assert_eq!(ra, fs::read(b.join("results.csv")).unwrap());
    assert_eq!(String::from_utf8_lossy(&ra).lines().count(), 1 + 2 * 2 * 3);
    assert!(a.join("timings.csv").exists());
    let summary = json(&a.join("summary.json"));
    assert_eq!(summary.as_array().unwrap().len(), 4);
    let c = run("c", &["--method", "esprit", "--seed", "2"]);
    let rc = fs::read_to_string(c.join("results.csv")).unwrap();
    assert_eq!(rc.lines().count(), 1 + 2 * 3);
    assert!(rc.lines().skip(1).all(|l| l.starts_with("esprit,")));
}
