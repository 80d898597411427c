//! Monte-Carlo sweeps: methods × (SNR, L, separation) points × trials.

use crate::array_model::{wrap_freq, ArrayGeometry};
use crate::error::{DoaError, Result};
use crate::estimators::{estimate, EstimateReport, Method, MethodParams};
use crate::io;
use crate::signal_sim::{simulate, AmplitudeModel, Correlation, SourceScenario};
use crate::spectrum::match_and_score;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::time::Instant;

pub const RESULTS_FILE: &str = "results.csv";
pub const TIMINGS_FILE: &str = "timings.csv";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub name: Method,
    #[serde(default)]
    pub params: MethodParams,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    /// Uniformly random frequencies, redrawn until the minimum separation holds.
    #[default]
    Random,
    /// Random offset, then consecutive sources exactly one separation apart.
    Equispaced,
}

/// Sweep description. Separations and the success threshold are in units of 1/N.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub geometry: ArrayGeometry,
    pub sources: usize,
    /// Per-source SNR in dB (unit source power); null means noiseless.
    pub snr_db: Vec<Option<f64>>,
    pub snapshots: Vec<usize>,
    pub separation: Vec<f64>,
    #[serde(default)]
    pub placement: Placement,
    #[serde(default)]
    pub amplitude: AmplitudeModel,
    pub methods: Vec<MethodSpec>,
    pub trials: usize,
    pub seed: u64,
    pub success_threshold: f64,
    /// Give every method the true K (unless it sets order/auto_order itself) and the true σ.
    #[serde(default = "yes")]
    pub oracle_params: bool,
}

fn yes() -> bool {
    true
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        if self.snr_db.is_empty() || self.snapshots.is_empty() || self.separation.is_empty() {
            return Err(DoaError::Config("sweep axes snr_db, snapshots and separation must be nonempty".into()));
        }
        if self.methods.is_empty() {
            return Err(DoaError::Config("methods must be nonempty".into()));
        }
        if self.trials == 0 {
            return Err(DoaError::Config("trials must be at least 1".into()));
        }
        if self.snapshots.contains(&0) {
            return Err(DoaError::Config("snapshot counts must be at least 1".into()));
        }
        if self.separation.iter().any(|s| !(*s >= 0.0)) || !(self.success_threshold > 0.0) {
            return Err(DoaError::Config("separations must be >= 0 and success_threshold > 0".into()));
        }
        if self.snr_db.iter().flatten().any(|s| !s.is_finite()) {
            return Err(DoaError::Config("snr_db entries must be finite or null".into()));
        }
        let n = self.geometry.n() as f64;
        if self.placement == Placement::Equispaced
            && self.separation.iter().any(|s| self.sources as f64 * s / n > 1.0)
        {
            return Err(DoaError::Config("K equispaced sources do not fit at this separation".into()));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for &snr_db in &self.snr_db {
            for &snapshots in &self.snapshots {
                for &separation in &self.separation {
                    out.push(Point {
                        index: out.len(),
                        snr_db,
                        snapshots,
                        separation,
                    });
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Point {
    pub index: usize,
    pub snr_db: Option<f64>,
    pub snapshots: usize,
    pub separation: f64,
}

impl Point {
    pub fn noise_variance(&self) -> f64 {
        self.snr_db.map_or(0.0, |s| 10f64.powf(-s / 10.0))
    }
}

/// One (method, point, trial) outcome. Runtime lives in [`TimingRow`] so this table is
/// reproducible bit for bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub method: String,
    pub point: usize,
    pub snr_db: Option<f64>,
    pub snapshots: usize,
    pub separation: f64,
    pub trial: usize,
    pub seed: u64,
    pub success: bool,
    pub rmse: Option<f64>,
    pub max_error: Option<f64>,
    pub n_estimated: Option<usize>,
    pub converged: Option<bool>,
    pub iterations: Option<usize>,
    pub primal_residual: Option<f64>,
    pub dual_residual: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub method: String,
    pub point: usize,
    pub trial: usize,
    pub runtime_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: String,
    pub point: usize,
    pub snr_db: Option<f64>,
    pub snapshots: usize,
    pub separation: f64,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Binomial standard error √(p(1−p)/n).
    pub success_se: f64,
    /// Mean and standard error of the RMSE over trials that produced an estimate.
    pub rmse_mean: Option<f64>,
    pub rmse_se: Option<f64>,
    pub failures: usize,
    pub unconverged: usize,
}

#[derive(Clone, Debug)]
pub struct BenchOutput {
    pub rows: Vec<ResultRow>,
    pub timings: Vec<TimingRow>,
    pub summary: Vec<SummaryRow>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// seed ⊕ hash(point, trial).
pub fn trial_seed(seed: u64, point: usize, trial: usize) -> u64 {
    seed ^ splitmix64(splitmix64(point as u64) ^ trial as u64)
}

fn draw_freqs(cfg: &ExperimentConfig, pt: &Point, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let k = cfg.sources;
    let sep = pt.separation / cfg.geometry.n() as f64;
    match cfg.placement {
        Placement::Equispaced => {
            let f0: f64 = rng.gen_range(-0.5..0.5);
            Ok((0..k).map(|i| wrap_freq(f0 + i as f64 * sep)).collect())
        }
        Placement::Random => {
            for _ in 0..10_000 {
                let f: Vec<f64> = (0..k).map(|_| wrap_freq(rng.gen_range(-0.5..0.5))).collect();
                if k < 2 || crate::array_model::min_separation(&f) >= sep {
                    return Ok(f);
                }
            }
            Err(DoaError::InvalidScenario(format!(
                "could not place {k} sources {sep} apart"
            )))
        }
    }
}

fn method_params(cfg: &ExperimentConfig, spec: &MethodSpec, sigma: f64) -> MethodParams {
    let mut p = spec.params.clone();
    if cfg.oracle_params {
        if p.order.is_none() && !p.auto_order {
            p.order = Some(cfg.sources);
        }
        if p.noise_variance.is_none() {
            p.noise_variance = Some(sigma);
        }
    }
    p
}

fn run_trial(cfg: &ExperimentConfig, pt: &Point, trial: usize) -> Vec<(ResultRow, TimingRow)> {
    let seed = trial_seed(cfg.seed, pt.index, trial);
    let sigma = pt.noise_variance();
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed));
    let data = draw_freqs(cfg, pt, &mut rng).and_then(|freqs| {
        let scn = SourceScenario {
            powers: vec![1.0; freqs.len()],
            freqs: freqs.clone(),
            doas_deg: None,
            amplitude: cfg.amplitude,
            correlation: Correlation::Uncorrelated,
            noise_variance: sigma,
            snapshots: pt.snapshots,
            seed,
        };
        Ok((freqs, simulate(&scn, &cfg.geometry)?.y))
    });
    let threshold = cfg.success_threshold / cfg.geometry.n() as f64;
    cfg.methods
        .iter()
        .map(|spec| {
            let mut row = ResultRow {
                method: spec.name.name().into(),
                point: pt.index,
                snr_db: pt.snr_db,
                snapshots: pt.snapshots,
                separation: pt.separation,
                trial,
                seed,
                success: false,
                rmse: None,
                max_error: None,
                n_estimated: None,
                converged: None,
                iterations: None,
                primal_residual: None,
                dual_residual: None,
                error: None,
            };
            let start = Instant::now();
            let outcome: Result<(Vec<f64>, EstimateReport)> = match &data {
                Ok((freqs, y)) => {
                    let p = method_params(cfg, spec, sigma);
                    let run = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
                        estimate(spec.name, y.as_ref(), &cfg.geometry, &p)
                    }));
                    match run {
                        Ok(r) => r.map(|rep| (freqs.clone(), rep)),
                        Err(_) => Err(DoaError::Degenerate("estimator panicked".into())),
                    }
                }
                Err(e) => Err(DoaError::InvalidScenario(e.to_string())),
            };
            let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
            match outcome {
                Ok((truth, rep)) => {
                    let score = match_and_score(&truth, &rep.freqs, threshold);
                    row.success = score.success;
                    row.rmse = Some(score.rmse);
                    row.max_error = Some(score.max_error);
                    row.n_estimated = Some(rep.freqs.len());
                    row.converged = Some(rep.converged);
                    row.iterations = Some(rep.iterations);
                    row.primal_residual = rep.primal_residual;
                    row.dual_residual = rep.dual_residual;
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            let timing = TimingRow {
                method: row.method.clone(),
                point: pt.index,
                trial,
                runtime_ms,
            };
            (row, timing)
        })
        .collect()
}

fn summarize(cfg: &ExperimentConfig, points: &[Point], rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut out = Vec::new();
    for pt in points {
        for spec in &cfg.methods {
            let name = spec.name.name();
            let sel: Vec<&ResultRow> = rows
                .iter()
                .filter(|r| r.point == pt.index && r.method == name)
                .collect();
            let n = sel.len();
            let successes = sel.iter().filter(|r| r.success).count();
            let p = successes as f64 / n.max(1) as f64;
            let rmses: Vec<f64> = sel.iter().filter_map(|r| r.rmse).collect();
            let (rmse_mean, rmse_se) = if rmses.is_empty() {
                (None, None)
            } else {
                let c = rmses.len() as f64;
                let mean = rmses.iter().sum::<f64>() / c;
                let var = if rmses.len() > 1 {
                    rmses.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (c - 1.0)
                } else {
                    0.0
                };
                (Some(mean), Some((var / c).sqrt()))
            };
            out.push(SummaryRow {
                method: name.into(),
                point: pt.index,
                snr_db: pt.snr_db,
                snapshots: pt.snapshots,
                separation: pt.separation,
                trials: n,
                successes,
                success_rate: p,
                success_se: (p * (1.0 - p) / n.max(1) as f64).sqrt(),
                rmse_mean,
                rmse_se,
                failures: sel.iter().filter(|r| r.error.is_some()).count(),
                unconverged: sel.iter().filter(|r| r.converged == Some(false)).count(),
            });
        }
    }
    out
}

/// Runs every (point, trial) job on the rayon pool; rows come back sorted by
/// (point, trial, method order in the config).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<BenchOutput> {
    cfg.validate()?;
    let points = cfg.points();
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..cfg.trials).map(move |t| (p, t)))
        .collect();
    let mut results: Vec<(usize, usize, Vec<(ResultRow, TimingRow)>)> = jobs
        .par_iter()
        .map(|&(p, t)| (p, t, run_trial(cfg, &points[p], t)))
        .collect();
    results.sort_by_key(|&(p, t, _)| (p, t));
    let (rows, timings): (Vec<_>, Vec<_>) = results.into_iter().flat_map(|(_, _, v)| v).unzip();
    let summary = summarize(cfg, &points, &rows);
    Ok(BenchOutput {
        rows,
        timings,
        summary,
    })
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let err = |e: csv::Error| DoaError::Io(std::io::Error::other(format!("{}: {e}", path.display())));
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    for r in rows {
        w.serialize(r).map_err(err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes results.csv, timings.csv and summary.json into `dir`.
pub fn write_outputs(out: &BenchOutput, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_csv(&dir.join(RESULTS_FILE), &out.rows)?;
    write_csv(&dir.join(TIMINGS_FILE), &out.timings)?;
    io::write_json(&dir.join(SUMMARY_FILE), &out.summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> ExperimentConfig {
        serde_json::from_str(
            r#"{
                "geometry": {"kind": "ula", "m": 6},
                "sources": 2,
                "snr_db": [null, 20, 10],
                "snapshots": [4],
                "separation": [1.5],
                "methods": [{"name": "esprit"}, {"name": "music", "params": {"grid_size": 512}}],
                "trials": 10,
                "seed": 11,
                "success_threshold": 0.1
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn one_row_per_method_point_trial() {
        let out = run_experiment(&config()).unwrap();
        assert_eq!(out.rows.len(), 60);
        assert_eq!(out.timings.len(), 60);
        assert_eq!(out.summary.len(), 6);
        assert!(out.rows.iter().all(|r| r.error.is_none()));
        assert_eq!(out.rows[0].method, "esprit");
        assert_eq!(out.rows[1].method, "music");
        assert!(out.summary.iter().all(|s| s.trials == 10));
    }

    #[test]
    fn seeds_depend_on_point_and_trial() {
        let a = trial_seed(5, 0, 1);
        assert_ne!(a, trial_seed(5, 1, 0));
        assert_ne!(a, trial_seed(5, 0, 2));
        assert_eq!(a, trial_seed(5, 0, 1));
        assert_eq!(a ^ 5, trial_seed(0, 0, 1));
    }

    #[test]
    fn failures_are_recorded_not_fatal() {
        let mut cfg = config();
        cfg.methods.push(MethodSpec {
            name: Method::L21Svd,
            params: MethodParams::default(),
        });
        cfg.snr_db = vec![Some(20.0)];
        cfg.trials = 2;
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.rows.len(), 6);
        let bad: Vec<_> = out.rows.iter().filter(|r| r.method == "l21-svd").collect();
        assert!(bad.iter().all(|r| r.error.as_deref().is_some_and(|e| e.contains("lambda")) && !r.success));
        assert_eq!(out.summary.iter().find(|s| s.method == "l21-svd").unwrap().failures, 2);
    }

    #[test]
    fn rejects_empty_axes() {
        let mut cfg = config();
        cfg.snapshots.clear();
        assert!(matches!(run_experiment(&cfg), Err(DoaError::Config(_))));
        let mut cfg = config();
        cfg.trials = 0;
        assert!(matches!(run_experiment(&cfg), Err(DoaError::Config(_))));
    }

    #[test]
    fn equispaced_placement_has_exact_gap() {
        let mut cfg = config();
        cfg.placement = Placement::Equispaced;
        let pt = cfg.points()[0];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = draw_freqs(&cfg, &pt, &mut rng).unwrap();
        let gap = crate::array_model::wrap_dist(f[0], f[1]);
        assert!((gap - 1.5 / 6.0).abs() < 1e-12);
    }
}
