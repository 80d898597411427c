//! Small Monte-Carlo sweep over SNR; writes CSV/JSON outputs to a temp directory.

use sparse_doa::bench::{run_experiment, write_outputs, ExperimentConfig};

fn main() -> sparse_doa::Result<()> {
    let cfg: ExperimentConfig = serde_json::from_str(
        r#"{
            "geometry": {"kind": "ula", "m": 10},
            "sources": 2,
            "snr_db": [0, 10, 20],
            "snapshots": [20],
            "separation": [1.5],
            "methods": [{"name": "music"}, {"name": "esprit"}, {"name": "l21-bpdn"}],
            "trials": 20,
            "seed": 1,
            "success_threshold": 0.2
        }"#,
    )?;
    let out = run_experiment(&cfg)?;
    for s in &out.summary {
        println!(
            "{:<9} snr {:>4?} dB  success {:.2} ± {:.2}  rmse {:.2e}",
            s.method,
            s.snr_db,
            s.success_rate,
            s.success_se,
            s.rmse_mean.unwrap_or(f64::NAN)
        );
    }
    let dir = std::env::temp_dir().join("sparse_doa_bench_sweep");
    write_outputs(&out, &dir)?;
    println!("outputs in {}", dir.display());
    Ok(())
}
