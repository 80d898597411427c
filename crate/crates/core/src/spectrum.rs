//! Frequency and power retrieval from structured covariance matrices, subspace baselines,
//! model-order selection and estimate scoring.

use crate::array_model::{steer_ula, wrap_dist, wrap_freq};
use crate::error::{DoaError, Result};
use crate::linalg::{self, herm_eig, pinv, CMat, C64};
use faer::{Mat, MatRef};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LineSpectrum {
    pub freqs: Vec<f64>,
    pub powers: Vec<f64>,
    #[serde(default)]
    pub sigma: Option<f64>,
}

impl LineSpectrum {
    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Σ p_k a(f_k)a(f_k)ᴴ (+ σI) on an N-element ULA.
    pub fn covariance(&self, n: usize) -> CMat {
        let mut u = crate::signal_sim::toeplitz_param(&self.freqs, &self.powers, n);
        if let Some(s) = self.sigma {
            u[0] += s;
        }
        crate::signal_sim::toeplitz(&u)
    }

    /// Drops atoms below `rel` × max power.
    pub fn pruned(mut self, rel: f64) -> Self {
        let pmax = self.powers.iter().cloned().fold(0.0, f64::max);
        let keep: Vec<usize> = (0..self.len())
            .filter(|&k| self.powers[k] > rel * pmax && self.powers[k] > 0.0)
            .collect();
        self.freqs = keep.iter().map(|&k| self.freqs[k]).collect();
        self.powers = keep.iter().map(|&k| self.powers[k]).collect();
        self
    }

    /// Keeps the `k` strongest atoms.
    pub fn strongest(mut self, k: usize) -> Self {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| self.powers[b].partial_cmp(&self.powers[a]).unwrap());
        idx.truncate(k);
        self.freqs = idx.iter().map(|&i| self.freqs[i]).collect();
        self.powers = idx.iter().map(|&i| self.powers[i]).collect();
        self.sorted()
    }

    /// Sorts atoms by frequency.
    pub fn sorted(mut self) -> Self {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| self.freqs[a].partial_cmp(&self.freqs[b]).unwrap());
        self.freqs = idx.iter().map(|&k| self.freqs[k]).collect();
        self.powers = idx.iter().map(|&k| self.powers[k]).collect();
        self
    }
}

/// Default relative eigenvalue threshold for numerical rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;
const PSD_TOL: f64 = 1e-6;

fn check_hermitian(t: MatRef<'_, C64>) -> Result<()> {
    let n = t.nrows();
    if t.ncols() != n {
        return Err(DoaError::Dimension("matrix must be square".into()));
    }
    let scale = t.norm_l2();
    let mut asym = 0.0;
    for i in 0..n {
        for j in 0..n {
            asym += (t[(i, j)] - t[(j, i)].conj()).norm_sqr();
        }
    }
    if asym.sqrt() > 1e-8 * scale.max(1e-300) {
        return Err(DoaError::Domain("matrix is not Hermitian".into()));
    }
    Ok(())
}

/// Weighted real least-squares system fitting the diagonal averages of `t` with atoms at
/// `freqs`; the weights reproduce the Frobenius norm over a Toeplitz matrix.
fn diagonal_fit_system(t: MatRef<'_, C64>, freqs: &[f64]) -> (Mat<f64>, Vec<f64>) {
    let n = t.nrows();
    let k = freqs.len();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(2 * n);
    let mut rhs = Vec::with_capacity(2 * n);
    for d in 0..n {
        let cnt = (n - d) as f64;
        let avg: C64 = (0..n - d).map(|i| t[(i, i + d)]).sum::<C64>() / cnt;
        let w = if d == 0 { cnt.sqrt() } else { (2.0 * cnt).sqrt() };
        let atoms: Vec<C64> = freqs
            .iter()
            .map(|&f| linalg::expi(-2.0 * PI * d as f64 * f))
            .collect();
        rows.push(atoms.iter().map(|a| a.re * w).collect());
        rhs.push(avg.re * w);
        if d > 0 {
            rows.push(atoms.iter().map(|a| a.im * w).collect());
            rhs.push(avg.im * w);
        }
    }
    let a = Mat::from_fn(rows.len(), k, |i, j| rows[i][j]);
    (a, rhs)
}

/// Nonnegative powers for fixed frequencies, fitted against the Toeplitz diagonals of `t`.
pub fn fit_powers(t: MatRef<'_, C64>, freqs: &[f64]) -> Vec<f64> {
    if freqs.is_empty() {
        return Vec::new();
    }
    let (a, b) = diagonal_fit_system(t, freqs);
    linalg::nnls(a.as_ref(), &b)
}

/// Vandermonde decomposition T = Σ p_k a(f_k)a(f_k)ᴴ of a PSD Toeplitz matrix.
pub fn vandermonde_decompose(t: MatRef<'_, C64>, rank_tol: f64) -> Result<LineSpectrum> {
    vandermonde_decompose_with(t, rank_tol, PSD_TOL)
}

/// As [`vandermonde_decompose`] with an explicit tolerance on negative eigenvalues
/// (relative to the largest).
pub fn vandermonde_decompose_with(
    t: MatRef<'_, C64>,
    rank_tol: f64,
    psd_tol: f64,
) -> Result<LineSpectrum> {
    check_hermitian(t)?;
    let n = t.nrows();
    let e = herm_eig(t);
    let lmax = e.values.last().copied().unwrap_or(0.0);
    if n == 0 || lmax <= 0.0 {
        if e.values.first().copied().unwrap_or(0.0) < -psd_tol * t.norm_l2() {
            return Err(DoaError::Domain("matrix is not PSD".into()));
        }
        return Ok(LineSpectrum::default());
    }
    if e.values[0] < -psd_tol * lmax {
        return Err(DoaError::Domain(format!(
            "matrix is not PSD: min eigenvalue {:.3e}, max {:.3e}",
            e.values[0], lmax
        )));
    }
    let keep: Vec<usize> = (0..n).filter(|&k| e.values[k] > rank_tol * lmax).collect();
    let r = keep.len();
    if r == n {
        // Full rank: fix one atom at f = 0 with the largest power that keeps the remainder
        // PSD, then decompose the rank-deficient remainder.
        let a0 = linalg::from_col(&steer_ula(n, 0.0));
        let x = linalg::hpd_solve(t, a0.as_ref());
        let q: f64 = (0..n).map(|i| (a0[(i, 0)].conj() * x[(i, 0)]).re).sum();
        let p0 = 1.0 / q;
        let rest = Mat::from_fn(n, n, |i, j| t[(i, j)] - a0[(i, 0)] * a0[(j, 0)].conj() * p0);
        let rest = linalg::hermitian_part(rest.as_ref());
        let mut out = vandermonde_decompose_with(rest.as_ref(), rank_tol, psd_tol.max(1e-6))?;
        out.freqs.push(0.0);
        out.powers.push(p0);
        return Ok(out.sorted());
    }
    if r == 0 {
        return Ok(LineSpectrum::default());
    }
    let v = Mat::from_fn(n, r, |i, j| e.vectors[(i, keep[j])] * e.values[keep[j]].sqrt());
    let v_top = v.subrows(0, n - 1);
    let v_bot = v.subrows(1, n - 1);
    let pencil = pinv(v_top, 1e-12) * v_bot;
    let z = linalg::eigenvalues(pencil.as_ref());
    let mut freqs: Vec<f64> = z.iter().map(|z| wrap_freq(z.arg() / (2.0 * PI))).collect();
    freqs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let powers = fit_powers(t, &freqs);
    let out = LineSpectrum {
        freqs,
        powers,
        sigma: None,
    };
    Ok(out.pruned(0.0))
}

/// Noise split T = Σ p_k a aᴴ + σI with σ = λ_min(T).
pub fn noise_split_decompose(t: MatRef<'_, C64>, rank_tol: f64) -> Result<LineSpectrum> {
    check_hermitian(t)?;
    let n = t.nrows();
    let ev = linalg::herm_eigenvalues(t);
    if n == 0 {
        return Ok(LineSpectrum::default());
    }
    let lmax = ev[n - 1].abs().max(ev[0].abs());
    if ev[0] < -PSD_TOL * lmax {
        return Err(DoaError::Domain("matrix is not PSD".into()));
    }
    let sigma = ev[0].max(0.0);
    let shifted = Mat::from_fn(n, n, |i, j| {
        if i == j {
            t[(i, j)] - sigma
        } else {
            t[(i, j)]
        }
    });
    let mut out = vandermonde_decompose(shifted.as_ref(), rank_tol)?;
    out.sigma = Some(sigma);
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub struct MusicOptions {
    pub grid_size: usize,
    pub refine: bool,
}

impl Default for MusicOptions {
    fn default() -> Self {
        MusicOptions {
            grid_size: 4096,
            refine: true,
        }
    }
}

fn noise_projection(en: MatRef<'_, C64>, f: f64) -> f64 {
    let n = en.nrows();
    let a = steer_ula(n, f);
    let mut s = 0.0;
    for j in 0..en.ncols() {
        let mut ip = C64::new(0.0, 0.0);
        for i in 0..n {
            ip += en[(i, j)].conj() * a[i];
        }
        s += ip.norm_sqr();
    }
    s
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    (lo + hi) / 2.0
}

fn subspace_split(r: MatRef<'_, C64>, k: usize) -> Result<(CMat, CMat, f64)> {
    let n = r.nrows();
    if k >= n {
        return Err(DoaError::Domain(format!("K={k} must be below N={n}")));
    }
    check_hermitian(r)?;
    let e = herm_eig(r);
    let es = Mat::from_fn(n, k, |i, j| e.vectors[(i, n - 1 - j)]);
    let en = Mat::from_fn(n, n - k, |i, j| e.vectors[(i, j)]);
    let sigma = e.values[..n - k].iter().sum::<f64>() / (n - k) as f64;
    Ok((es, en, sigma.max(0.0)))
}

fn attach_powers(r: MatRef<'_, C64>, freqs: Vec<f64>, sigma: f64) -> LineSpectrum {
    let n = r.nrows();
    let shifted = Mat::from_fn(n, n, |i, j| if i == j { r[(i, j)] - sigma } else { r[(i, j)] });
    let powers = fit_powers(shifted.as_ref(), &freqs);
    LineSpectrum {
        freqs,
        powers,
        sigma: Some(sigma),
    }
}

/// MUSIC pseudospectrum peaks on a dense grid, optionally refined by golden section.
pub fn music(r: MatRef<'_, C64>, k: usize, opts: MusicOptions) -> Result<LineSpectrum> {
    if k == 0 {
        return Ok(LineSpectrum::default());
    }
    let (_, en, sigma) = subspace_split(r, k)?;
    let g = opts.grid_size.max(4 * r.nrows());
    let step = 1.0 / g as f64;
    let grid: Vec<f64> = (0..g).map(|i| -0.5 + (i + 1) as f64 * step).collect();
    let vals: Vec<f64> = grid.iter().map(|&f| noise_projection(en.as_ref(), f)).collect();
    let mut peaks: Vec<usize> = (0..g)
        .filter(|&i| {
            let prev = vals[(i + g - 1) % g];
            let next = vals[(i + 1) % g];
            vals[i] <= prev && vals[i] < next
        })
        .collect();
    peaks.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
    peaks.truncate(k);
    let mut freqs: Vec<f64> = peaks
        .iter()
        .map(|&i| {
            if opts.refine {
                let c = grid[i];
                let f = golden_min(|f| noise_projection(en.as_ref(), f), c - step, c + step, 1e-13);
                wrap_freq(f)
            } else {
                grid[i]
            }
        })
        .collect();
    freqs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(attach_powers(r, freqs, sigma))
}

/// Least-squares ESPRIT on the K-dimensional signal subspace.
pub fn esprit(r: MatRef<'_, C64>, k: usize) -> Result<LineSpectrum> {
    if k == 0 {
        return Ok(LineSpectrum::default());
    }
    let (es, _, sigma) = subspace_split(r, k)?;
    let n = r.nrows();
    let phi = pinv(es.subrows(0, n - 1), 1e-12) * es.subrows(1, n - 1);
    let mut freqs: Vec<f64> = linalg::eigenvalues(phi.as_ref())
        .iter()
        .map(|z| wrap_freq(z.arg() / (2.0 * PI)))
        .collect();
    freqs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(attach_powers(r, freqs, sigma))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ModelOrder {
    pub k: usize,
    /// False when no eigen-gap stands out; `k` then falls back to N−1.
    pub confident: bool,
}

/// Smallest gap ratio accepted as evidence of a signal/noise split.
pub const MIN_GAP_RATIO: f64 = 2.0;

/// Eigen-gap rule K̂ = argmax λ_k/λ_{k+1}, 1 ≤ k ≤ N−2, on a nonincreasing list.
pub fn model_order(eigs_desc: &[f64]) -> Result<ModelOrder> {
    let n = eigs_desc.len();
    if n < 3 {
        return Err(DoaError::Degenerate("need at least three eigenvalues".into()));
    }
    if eigs_desc.iter().any(|&l| l < 0.0 || l.is_nan()) {
        return Err(DoaError::Domain("eigenvalues must be nonnegative".into()));
    }
    if eigs_desc.windows(2).any(|w| w[1] > w[0]) {
        return Err(DoaError::Domain("eigenvalues must be nonincreasing".into()));
    }
    let l1 = eigs_desc[0];
    if l1 == 0.0 {
        return Ok(ModelOrder {
            k: 0,
            confident: true,
        });
    }
    let floor = 1e-14 * l1;
    let (mut best, mut ratio) = (1, 0.0);
    for k in 1..=n - 2 {
        let q = eigs_desc[k - 1] / eigs_desc[k].max(floor);
        if q > ratio {
            ratio = q;
            best = k;
        }
    }
    if ratio < MIN_GAP_RATIO {
        return Ok(ModelOrder {
            k: n - 1,
            confident: false,
        });
    }
    Ok(ModelOrder {
        k: best,
        confident: true,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    /// (true f, estimated f) pairs.
    pub pairs: Vec<(f64, f64)>,
    pub errors: Vec<f64>,
    pub unmatched_truth: usize,
    pub unmatched_estimates: usize,
    pub rmse: f64,
    pub max_error: f64,
    pub success: bool,
}

/// Min-cost assignment of rows to columns (rows ≤ cols); returns column per row.
fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let m = cost[0].len();
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=m {
        if p[j] != 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    assign
}

/// Optimal assignment of estimates to true frequencies under wrap-around distance.
pub fn match_and_score(truth: &[f64], est: &[f64], threshold: f64) -> MatchReport {
    let (nt, ne) = (truth.len(), est.len());
    let mut pairs = Vec::new();
    if nt <= ne {
        let cost: Vec<Vec<f64>> = truth
            .iter()
            .map(|&t| est.iter().map(|&e| wrap_dist(t, e)).collect())
            .collect();
        for (i, j) in hungarian(&cost).into_iter().enumerate() {
            pairs.push((truth[i], est[j]));
        }
    } else {
        let cost: Vec<Vec<f64>> = est
            .iter()
            .map(|&e| truth.iter().map(|&t| wrap_dist(t, e)).collect())
            .collect();
        for (i, j) in hungarian(&cost).into_iter().enumerate() {
            pairs.push((truth[j], est[i]));
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    }
    let errors: Vec<f64> = pairs.iter().map(|&(t, e)| wrap_dist(t, e)).collect();
    let rmse = if errors.is_empty() {
        0.0
    } else {
        (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt()
    };
    let max_error = errors.iter().cloned().fold(0.0, f64::max);
    let unmatched_truth = nt - pairs.len();
    MatchReport {
        unmatched_truth,
        unmatched_estimates: ne - pairs.len(),
        rmse,
        max_error,
        success: unmatched_truth == 0 && max_error < threshold,
        pairs,
        errors,
    }
}
