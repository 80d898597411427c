//! File formats: snapshot CSV, scenario/ground-truth JSON, decomposition input.

use crate::array_model::ArrayGeometry;
use crate::error::{DoaError, Result};
use crate::linalg::{CMat, C64};
use crate::signal_sim::SourceScenario;
use faer::{Mat, MatRef};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

pub const SNAPSHOTS_FILE: &str = "snapshots.csv";
pub const TRUTH_FILE: &str = "truth.json";
pub const SPECTRUM_FILE: &str = "spectrum.json";

/// Input of `simulate` and the ground truth it writes next to the snapshots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub geometry: ArrayGeometry,
    pub scenario: SourceScenario,
}

/// Input of `decompose`: the first column u of a Hermitian Toeplitz matrix as [re, im] pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeInput {
    pub u: Vec<[f64; 2]>,
    /// Split off σ = λ_min first instead of requiring a rank-deficient T.
    #[serde(default)]
    pub noise_split: bool,
    #[serde(default)]
    pub rank_tol: Option<f64>,
}

impl DecomposeInput {
    pub fn u(&self) -> Vec<C64> {
        self.u.iter().map(|&[re, im]| C64::new(re, im)).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct SnapshotRecord {
    sensor: usize,
    snapshot: usize,
    re: f64,
    im: f64,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> DoaError {
    DoaError::Io(std::io::Error::other(format!("{}: {e}", path.display())))
}

/// Reads JSON; parse errors carry the path plus serde's line/column and field name.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| DoaError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| DoaError::Config(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Long format, one row per entry: sensor,snapshot,re,im.
pub fn write_snapshots(path: &Path, y: MatRef<'_, C64>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    for j in 0..y.ncols() {
        for i in 0..y.nrows() {
            let v = y[(i, j)];
            w.serialize(SnapshotRecord {
                sensor: i,
                snapshot: j,
                re: v.re,
                im: v.im,
            })
            .map_err(|e| io_err(path, e))?;
        }
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn read_snapshots(path: &Path) -> Result<CMat> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    let mut recs = Vec::new();
    for (k, rec) in r.deserialize::<SnapshotRecord>().enumerate() {
        recs.push(rec.map_err(|e| DoaError::Config(format!("{} record {}: {e}", path.display(), k + 1)))?);
    }
    let m = recs.iter().map(|r| r.sensor + 1).max().unwrap_or(0);
    let l = recs.iter().map(|r| r.snapshot + 1).max().unwrap_or(0);
    if m == 0 || recs.len() != m * l {
        return Err(DoaError::Config(format!(
            "{}: expected a full {m}×{l} grid of entries, found {}",
            path.display(),
            recs.len()
        )));
    }
    let mut seen = vec![false; m * l];
    let mut y = Mat::zeros(m, l);
    for r in recs {
        let idx = r.snapshot * m + r.sensor;
        if seen[idx] {
            return Err(DoaError::Config(format!(
                "{}: duplicate entry ({}, {})",
                path.display(),
                r.sensor,
                r.snapshot
            )));
        }
        seen[idx] = true;
        y[(r.sensor, r.snapshot)] = C64::new(r.re, r.im);
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshots_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("y.csv");
        let y = Mat::from_fn(3, 4, |i, j| C64::new(0.1 * i as f64 - 1.0 / 3.0, (j as f64).sqrt() * 1e-17));
        write_snapshots(&p, y.as_ref()).unwrap();
        let back = read_snapshots(&p).unwrap();
        assert_eq!(back, y);
        let text = fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("sensor,snapshot,re,im\n"));
    }

    #[test]
    fn incomplete_snapshot_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("y.csv");
        fs::write(&p, "sensor,snapshot,re,im\n0,0,1,0\n1,1,1,0\n").unwrap();
        assert!(matches!(read_snapshots(&p), Err(DoaError::Config(_))));
    }

    #[test]
    fn json_errors_name_line_and_field() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        fs::write(&p, "{\n  \"geometry\": {\"kind\": \"ula\", \"m\": 4},\n  \"scenario\": {\"freqs\": []}\n}\n").unwrap();
        let err = read_json::<ScenarioFile>(&p).unwrap_err().to_string();
        assert!(err.contains("line 3") && err.contains("powers"), "{err}");
    }
}
