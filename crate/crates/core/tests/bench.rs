use sparse_doa::bench::{run_experiment, write_outputs, ExperimentConfig};
use std::fs;

fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

#[test]
fn spearman_helper_matches_hand_values() {
    assert!((spearman(&[1.0, 2.0, 3.0], &[2.0, 4.0, 9.0]) - 1.0).abs() < 1e-12);
    assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-12);
    assert_eq!(ranks(&[5.0, 1.0, 5.0]), vec![2.5, 1.0, 2.5]);
}

#[test]
fn anm_success_grows_with_separation() {
    let cfg: ExperimentConfig = serde_json::from_str(
        r#"{
            "geometry": {"kind": "ula", "m": 8},
            "sources": 2,
            "snr_db": [null],
            "snapshots": [1],
            "separation": [0.25, 0.5, 0.75, 1.0, 1.5, 2.0],
            "placement": "equispaced",
            "methods": [{"name": "anm"}],
            "trials": 12,
            "seed": 2024,
            "success_threshold": 0.05
        }"#,
    )
    .unwrap();
    let out = run_experiment(&cfg).unwrap();
    let sep: Vec<f64> = out.summary.iter().map(|s| s.separation).collect();
    let rate: Vec<f64> = out.summary.iter().map(|s| s.success_rate).collect();
    let rho = spearman(&sep, &rate);
    println!("separation {sep:?} success {rate:?} spearman {rho:.3}");
    assert!(rho >= 0.8, "spearman {rho}");
}

#[test]
fn rerun_gives_identical_results_csv() {
    let cfg: ExperimentConfig = serde_json::from_str(
        r#"{
            "geometry": {"kind": "sla", "n": 10, "omega": [1, 2, 4, 7, 10]},
            "sources": 2,
            "snr_db": [20, 5],
            "snapshots": [3, 10],
            "separation": [2],
            "methods": [{"name": "anm"}, {"name": "l21-bpdn", "params": {"grid_size": 60}}],
            "trials": 2,
            "seed": 9,
            "success_threshold": 0.2
        }"#,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    write_outputs(&run_experiment(&cfg).unwrap(), &a).unwrap();
    write_outputs(&run_experiment(&cfg).unwrap(), &b).unwrap();
    let ra = fs::read(a.join("results.csv")).unwrap();
    assert_eq!(ra, fs::read(b.join("results.csv")).unwrap());
    assert_eq!(String::from_utf8(ra).unwrap().lines().count(), 1 + 2 * 4 * 2);
    assert_eq!(fs::read(a.join("summary.json")).unwrap(), fs::read(b.join("summary.json")).unwrap());
}
