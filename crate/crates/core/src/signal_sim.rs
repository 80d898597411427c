//! Synthetic snapshots and the structured matrices built from them.

use crate::array_model::{steering_matrix, steering_vector_doa, ArrayGeometry};
use crate::error::{DoaError, Result};
use crate::linalg::{cx, expi, psd_sqrt, CMat, C64, ZERO};
use faer::{Mat, MatRef};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AmplitudeModel {
    #[default]
    ComplexGaussian,
    ConstantModulus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Correlation {
    #[default]
    Uncorrelated,
    /// Every source copies the master row up to scale and a fixed phase.
    Coherent { master: usize },
    /// Source covariance, row-major real and imaginary parts (K×K).
    Covariance { re: Vec<f64>, im: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceScenario {
    pub freqs: Vec<f64>,
    pub powers: Vec<f64>,
    /// DOAs in degrees; used instead of `freqs` for planar arrays.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doas_deg: Option<Vec<f64>>,
    #[serde(default)]
    pub amplitude: AmplitudeModel,
    #[serde(default)]
    pub correlation: Correlation,
    pub noise_variance: f64,
    pub snapshots: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct Simulated {
    pub y: CMat,
    pub s: CMat,
    pub z: CMat,
    pub e: CMat,
}

/// Circular complex Gaussian with variance `var`.
pub fn cn(rng: &mut impl Rng, var: f64) -> C64 {
    let s = (var / 2.0).sqrt();
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    cx(a * s, b * s)
}

pub fn cn_matrix(rng: &mut impl Rng, r: usize, c: usize, var: f64) -> CMat {
    let mut out = Mat::zeros(r, c);
    for i in 0..r {
        for j in 0..c {
            out[(i, j)] = cn(rng, var);
        }
    }
    out
}

fn validate(scn: &SourceScenario, geom: &ArrayGeometry) -> Result<usize> {
    let k = if geom.is_linear() {
        scn.freqs.len()
    } else {
        scn.doas_deg.as_ref().map_or(0, |d| d.len())
    };
    if scn.powers.len() != k {
        return Err(DoaError::InvalidScenario("powers/sources length mismatch".into()));
    }
    if scn.powers.iter().any(|&p| p.is_nan() || p <= 0.0) {
        return Err(DoaError::InvalidScenario("powers must be positive".into()));
    }
    if scn.noise_variance.is_nan() || scn.noise_variance < 0.0 {
        return Err(DoaError::InvalidScenario("noise variance must be >= 0".into()));
    }
    if scn.snapshots == 0 {
        return Err(DoaError::InvalidScenario("need L >= 1".into()));
    }
    let loc: Vec<f64> = if geom.is_linear() {
        scn.freqs.clone()
    } else {
        scn.doas_deg.clone().unwrap_or_default()
    };
    for i in 0..loc.len() {
        for j in i + 1..loc.len() {
            if loc[i] == loc[j] {
                return Err(DoaError::InvalidScenario("duplicate source location".into()));
            }
        }
    }
    if let Correlation::Coherent { master } = scn.correlation {
        if k < 2 || master >= k {
            return Err(DoaError::InvalidScenario(
                "coherent mode needs K >= 2 and a valid master index".into(),
            ));
        }
    }
    Ok(k)
}

fn amplitude(rng: &mut impl Rng, model: AmplitudeModel) -> C64 {
    match model {
        AmplitudeModel::ComplexGaussian => cn(rng, 1.0),
        AmplitudeModel::ConstantModulus => expi(2.0 * PI * rng.gen::<f64>()),
    }
}

/// Y = A S + E; deterministic given the seed.
pub fn simulate(scn: &SourceScenario, geom: &ArrayGeometry) -> Result<Simulated> {
    geom.validate()?;
    let k = validate(scn, geom)?;
    let (m, l) = (geom.m(), scn.snapshots);
    let mut rng = ChaCha8Rng::seed_from_u64(scn.seed);
    let a = if geom.is_linear() {
        steering_matrix(&geom.positions()?, &scn.freqs)
    } else {
        let doas = scn.doas_deg.clone().unwrap_or_default();
        let cols: Vec<Vec<C64>> = doas
            .iter()
            .map(|&t| steering_vector_doa(geom, t))
            .collect::<Result<_>>()?;
        Mat::from_fn(m, k, |i, j| cols[j][i])
    };
    let mut s = Mat::zeros(k, l);
    match &scn.correlation {
        Correlation::Uncorrelated => {
            for i in 0..k {
                let sp = scn.powers[i].sqrt();
                for t in 0..l {
                    s[(i, t)] = amplitude(&mut rng, scn.amplitude) * sp;
                }
            }
        }
        Correlation::Coherent { master } => {
            let row: Vec<C64> = (0..l).map(|_| amplitude(&mut rng, scn.amplitude)).collect();
            for i in 0..k {
                let phase = if i == *master {
                    cx(1.0, 0.0)
                } else {
                    expi(2.0 * PI * rng.gen::<f64>())
                };
                let sp = scn.powers[i].sqrt();
                for t in 0..l {
                    s[(i, t)] = row[t] * phase * sp;
                }
            }
        }
        Correlation::Covariance { re, im } => {
            if re.len() != k * k || im.len() != k * k {
                return Err(DoaError::InvalidScenario("covariance must be K×K".into()));
            }
            let c = Mat::from_fn(k, k, |i, j| cx(re[i * k + j], im[i * k + j]));
            let ev = crate::linalg::herm_eigenvalues(c.as_ref());
            let scale = ev.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            if ev.first().copied().unwrap_or(0.0) < -1e-12 * scale.max(1.0) {
                return Err(DoaError::InvalidScenario("covariance must be PSD".into()));
            }
            let g = cn_matrix(&mut rng, k, l, 1.0);
            s = psd_sqrt(c.as_ref()) * g;
        }
    }
    let z = &a * &s;
    let e = cn_matrix(&mut rng, m, l, scn.noise_variance);
    let y = &z + &e;
    Ok(Simulated { y, s, z, e })
}

/// R̃ = Y Yᴴ / L.
pub fn sample_covariance(y: MatRef<'_, C64>) -> CMat {
    let l = y.ncols().max(1) as f64;
    let r = y * y.adjoint();
    crate::linalg::scale(r.as_ref(), 1.0 / l)
}

/// Hermitian Toeplitz T(u) with first row u.
pub fn toeplitz(u: &[C64]) -> CMat {
    let n = u.len();
    Mat::from_fn(n, n, |i, j| {
        if j >= i {
            u[j - i]
        } else {
            u[i - j].conj()
        }
    })
}

/// Adjoint of u ↦ T(u) under ⟨A, B⟩ = Re tr(Aᴴ B).
pub fn diag_sum(m: MatRef<'_, C64>) -> Vec<C64> {
    let n = m.nrows();
    let mut d = vec![ZERO; n];
    for i in 0..n {
        d[0] += m[(i, i)];
    }
    for (k, dk) in d.iter_mut().enumerate().skip(1) {
        for i in 0..n - k {
            *dk += m[(i, i + k)] + m[(i + k, i)].conj();
        }
    }
    d
}

/// u with T(u) = Σ p_k a(f_k) a(f_k)ᴴ on an N-element ULA.
pub fn toeplitz_param(freqs: &[f64], powers: &[f64], n: usize) -> Vec<C64> {
    (0..n)
        .map(|j| {
            freqs
                .iter()
                .zip(powers)
                .map(|(&f, &p)| expi(-2.0 * PI * j as f64 * f) * p)
                .sum()
        })
        .collect()
}

/// Lag estimates ũ from an SLA covariance by averaging entries at each lag.
pub fn coarray_average(r: MatRef<'_, C64>, geom: &ArrayGeometry) -> Result<Vec<C64>> {
    let pos = geom.positions()?;
    let n = geom.n();
    if r.nrows() != pos.len() || r.ncols() != pos.len() {
        return Err(DoaError::Dimension("covariance must be M×M".into()));
    }
    let mut sum = vec![ZERO; n];
    let mut cnt = vec![0usize; n];
    for a in 0..pos.len() {
        for b in 0..pos.len() {
            if pos[b] >= pos[a] {
                let d = pos[b] - pos[a];
                sum[d] += r[(a, b)];
                cnt[d] += 1;
            } else {
                let d = pos[a] - pos[b];
                sum[d] += r[(a, b)].conj();
                cnt[d] += 1;
            }
        }
    }
    let mut u = Vec::with_capacity(n);
    for d in 0..n {
        if cnt[d] == 0 {
            return Err(DoaError::NotRedundancy(d));
        }
        u.push(sum[d] / cnt[d] as f64);
    }
    u[0].im = 0.0;
    Ok(u)
}

/// Virtual (2N−1)-element snapshot built from a Toeplitz parameter.
pub fn virtual_snapshot(u: &[C64]) -> Vec<C64> {
    let n = u.len();
    (1..2 * n)
        .map(|j| if j <= n { u[n - j] } else { u[j - n].conj() })
        .collect()
}

/// Block Hankel lift of an N×L ULA snapshot matrix: m × (nL), n = N + 1 − m.
pub fn hankel_lift(z: MatRef<'_, C64>, m: usize) -> Result<CMat> {
    let nn = z.nrows();
    if m == 0 || m > nn {
        return Err(DoaError::Domain(format!("pencil m={m} outside 1..={nn}")));
    }
    let n = nn + 1 - m;
    Ok(Mat::from_fn(m, n * z.ncols(), |i, c| z[(i + c % n, c / n)]))
}

/// Adjoint of the Hankel lift: anti-diagonal sums back into N×L.
pub fn hankel_adjoint(h: MatRef<'_, C64>, nn: usize, l: usize) -> CMat {
    let m = h.nrows();
    let n = nn + 1 - m;
    let mut z = Mat::zeros(nn, l);
    for c in 0..n * l {
        let (t, j) = (c / n, c % n);
        for i in 0..m {
            z[(i + j, t)] += h[(i, c)];
        }
    }
    z
}

/// Number of Hankel entries per sample index (anti-diagonal lengths).
pub fn hankel_counts(nn: usize, m: usize) -> Vec<f64> {
    let n = nn + 1 - m;
    (0..nn)
        .map(|k| {
            let lo = k.saturating_sub(n - 1);
            let hi = k.min(m - 1);
            (hi + 1 - lo) as f64
        })
        .collect()
}
