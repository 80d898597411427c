//! ADMM for PSD-block semidefinite programs with Toeplitz or Hankel structure.
//!
//! Toeplitz problems:
//!
//! ```text
//! min  c_x tr(X) + tr(W T(u)) + data term
//! s.t. [[X, Zᴴ], [Z, T(u)]] ⪰ 0,  Z_Ω ∈ S
//! ```
//!
//! Hankel problems replace `Z`/`T(u)` with `H(z)` and a free Hermitian block `Q₂`,
//! costing `c_x tr(Q₁) + c_t tr(Q₂)`.
//!
//! The data set `S` is an equality `Z_Ω = Y_Ω`, a Frobenius ball of radius η around `Y_Ω`,
//! or a quadratic penalty `(μ/2)‖Z_Ω − Y_Ω‖²_F`. Rows outside Ω are free.

use crate::error::{DoaError, Result};
use crate::linalg::{self, herm_eig, CMat, C64, ZERO};
use crate::signal_sim::{diag_sum, hankel_adjoint, hankel_counts, hankel_lift, toeplitz};
use faer::{Mat, MatRef};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BlockKind {
    /// T(u) is N×N Toeplitz.
    Toeplitz { n: usize },
    /// H(z) is m×(nL) block Hankel of an N×L signal, n = N + 1 − m.
    Hankel { n: usize, m: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum DataMode {
    Equality,
    Ball(f64),
    Quadratic(f64),
}

#[derive(Clone, Debug)]
pub enum TraceCost {
    /// c·tr(T); for Hankel blocks, c·tr(Q₂).
    Scalar(f64),
    /// tr(W T(u)) with W Hermitian PSD (Toeplitz only).
    Weighted(CMat),
}

#[derive(Clone, Debug)]
pub struct BlockSdpProblem {
    pub kind: BlockKind,
    /// 0-based rows of Z carrying data.
    pub observed: Vec<usize>,
    /// |Ω|×L data Y_Ω.
    pub data: CMat,
    pub mode: DataMode,
    pub cost_x: f64,
    pub cost_t: TraceCost,
}

#[derive(Clone, Copy, Debug)]
pub struct AdmmConfig {
    pub beta: f64,
    pub tol_primal: f64,
    pub tol_dual: f64,
    pub max_iters: usize,
    /// Residual-balancing adaptation of β.
    pub adapt: bool,
    /// Over-relaxation factor in [1, 2).
    pub relax: f64,
    /// Keep an iteration log (every iteration).
    pub log: bool,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        AdmmConfig {
            beta: 1.0,
            tol_primal: 1e-6,
            tol_dual: 1e-6,
            max_iters: 50_000,
            adapt: true,
            relax: 1.0,
            log: false,
        }
    }
}

impl AdmmConfig {
    pub fn with_tol(tol: f64) -> Self {
        AdmmConfig {
            tol_primal: tol,
            tol_dual: tol,
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct IterLog {
    pub iter: usize,
    pub objective: f64,
    pub primal_res: f64,
    pub dual_res: f64,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    /// Toeplitz parameter (empty for Hankel problems).
    pub u: Vec<C64>,
    /// N×L signal estimate.
    pub z: CMat,
    /// Top-left block (X or Q₁).
    pub x: CMat,
    /// Free bottom-right block Q₂ (Hankel only).
    pub q2: Option<CMat>,
    pub objective: f64,
    /// Relative residuals at exit.
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub log: Vec<IterLog>,
    /// Final splitting variable, multiplier and penalty for warm starts (internal scaling).
    pub warm: Option<WarmStart>,
}

#[derive(Clone, Debug)]
pub struct WarmStart {
    pub q: CMat,
    pub lambda: CMat,
    pub beta: f64,
    pub scale: f64,
}

impl SdpSolution {
    /// T(u) for Toeplitz problems.
    pub fn t(&self) -> CMat {
        toeplitz(&self.u)
    }
}

impl BlockSdpProblem {
    fn l(&self) -> usize {
        self.data.ncols()
    }

    fn n_signal(&self) -> usize {
        match self.kind {
            BlockKind::Toeplitz { n } | BlockKind::Hankel { n, .. } => n,
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_signal();
        if self.observed.len() != self.data.nrows() {
            return Err(DoaError::Dimension("observed rows vs data rows".into()));
        }
        if self.observed.iter().any(|&o| o >= n) || self.observed.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DoaError::Dimension("observed rows must be increasing and < N".into()));
        }
        if self.l() == 0 {
            return Err(DoaError::Dimension("data needs at least one column".into()));
        }
        match self.mode {
            DataMode::Ball(e) if e < 0.0 || e.is_nan() => {
                return Err(DoaError::Domain("ball radius must be >= 0".into()))
            }
            DataMode::Quadratic(mu) if mu <= 0.0 || mu.is_nan() => {
                return Err(DoaError::Domain("quadratic weight must be > 0".into()))
            }
            _ => {}
        }
        if let BlockKind::Hankel { m, .. } = self.kind {
            if m == 0 || m > n {
                return Err(DoaError::Domain("Hankel pencil m outside 1..=N".into()));
            }
        }
        if let TraceCost::Weighted(w) = &self.cost_t {
            if matches!(self.kind, BlockKind::Hankel { .. }) {
                return Err(DoaError::Domain("weighted cost needs a Toeplitz block".into()));
            }
            if w.nrows() != n || w.ncols() != n {
                return Err(DoaError::Dimension("weight must be N×N".into()));
            }
            let ev = linalg::herm_eigenvalues(w.as_ref());
            let scale = ev.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            if ev[0] < -1e-10 * scale.max(1e-300) {
                return Err(DoaError::Domain("weight must be PSD".into()));
            }
        }
        Ok(())
    }

    /// Objective at (X, u or Q₂, Z) in the problem's own scaling.
    pub fn objective(&self, x: MatRef<'_, C64>, u: &[C64], q2: Option<MatRef<'_, C64>>, z: MatRef<'_, C64>) -> f64 {
        let mut obj = self.cost_x * linalg::trace(x).re;
        match (&self.kind, &self.cost_t) {
            (BlockKind::Toeplitz { .. }, TraceCost::Scalar(c)) => obj += c * u.len() as f64 * u[0].re,
            (BlockKind::Toeplitz { .. }, TraceCost::Weighted(w)) => {
                let d = diag_sum(w.as_ref());
                obj += u.iter().zip(&d).map(|(a, b)| (a.conj() * b).re).sum::<f64>();
            }
            (BlockKind::Hankel { .. }, TraceCost::Scalar(c)) => {
                obj += c * q2.map_or(0.0, |q| linalg::trace(q).re)
            }
            _ => {}
        }
        if let DataMode::Quadratic(mu) = self.mode {
            let mut r = 0.0;
            for (k, &o) in self.observed.iter().enumerate() {
                for t in 0..self.l() {
                    r += (z[(o, t)] - self.data[(k, t)]).norm_sqr();
                }
            }
            obj += 0.5 * mu * r;
        }
        obj
    }
}

struct Scaled {
    data: CMat,
    mode: DataMode,
}

fn ball_project_weighted(h: &[C64], w: &[f64], y: &[C64], eta: f64) -> Vec<C64> {
    // min Σ w_j |z_j − h_j|² s.t. Σ |z_j − y_j|² ≤ η²
    let dist2: f64 = h.iter().zip(y).map(|(a, b)| (a - b).norm_sqr()).sum();
    if dist2 <= eta * eta {
        return h.to_vec();
    }
    if eta == 0.0 {
        return y.to_vec();
    }
    let eval = |nu: f64| -> f64 {
        h.iter()
            .zip(y)
            .zip(w)
            .map(|((a, b), &wj)| ((a - b) * (wj / (wj + nu))).norm_sqr())
            .sum::<f64>()
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while eval(hi) > eta * eta {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if eval(mid) > eta * eta {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    h.iter()
        .zip(y)
        .zip(w)
        .map(|((a, b), &wj)| b + (a - b) * (wj / (wj + hi)))
        .collect()
}

/// Data-set update for observed entries: minimize Σ w_j|z_j − h_j|²·β + data term.
fn data_update(h: &[C64], w: &[f64], y: &[C64], mode: DataMode, beta: f64) -> Vec<C64> {
    match mode {
        DataMode::Equality => y.to_vec(),
        DataMode::Ball(eta) => ball_project_weighted(h, w, y, eta),
        DataMode::Quadratic(mu) => h
            .iter()
            .zip(y)
            .zip(w)
            .map(|((a, b), &wj)| (a * (2.0 * beta * wj) + b * mu) / (2.0 * beta * wj + mu))
            .collect(),
    }
}

fn psd_split(a: MatRef<'_, C64>) -> CMat {
    let e = herm_eig(a);
    linalg::rebuild(&e, |l| l.max(0.0))
}

/// Solves the problem by ADMM. Non-convergence is reported through `converged = false`.
pub fn admm_solve(problem: &BlockSdpProblem, cfg: &AdmmConfig) -> Result<SdpSolution> {
    admm_solve_warm(problem, cfg, None)
}

pub fn admm_solve_warm(
    problem: &BlockSdpProblem,
    cfg: &AdmmConfig,
    warm: Option<&WarmStart>,
) -> Result<SdpSolution> {
    problem.validate()?;
    let n = problem.n_signal();
    let l = problem.l();
    let ynorm = problem.data.norm_l2();
    let inside_ball = matches!(problem.mode, DataMode::Ball(eta) if ynorm <= eta);
    if ynorm == 0.0 || inside_ball {
        // Every block is zero at the optimum of a nonnegative cost.
        return Ok(zero_solution(problem));
    }
    // Normalize so the data have unit RMS entry; the problem is 1-homogeneous except
    // for the quadratic weight, which absorbs the scale.
    let scale = warm.map_or(ynorm / ((problem.data.nrows() * l) as f64).sqrt(), |w| w.scale);
    let sc = Scaled {
        data: linalg::scale(problem.data.as_ref(), 1.0 / scale),
        mode: match problem.mode {
            DataMode::Equality => DataMode::Equality,
            DataMode::Ball(e) => DataMode::Ball(e / scale),
            DataMode::Quadratic(mu) => DataMode::Quadratic(mu * scale),
        },
    };
    let (p, q_dim) = match problem.kind {
        BlockKind::Toeplitz { n } => (l, n),
        BlockKind::Hankel { n, m } => ((n + 1 - m) * l, m),
    };
    let d = p + q_dim;
    let mut beta = warm.map_or(cfg.beta, |w| w.beta);
    let mut q = warm.map_or_else(|| Mat::zeros(d, d), |w| w.q.clone());
    let mut lam = warm.map_or_else(|| Mat::zeros(d, d), |w| w.lambda.clone());
    if q.nrows() != d || lam.nrows() != d {
        return Err(DoaError::Dimension("warm start has the wrong size".into()));
    }

    let w_adj: Vec<C64> = match &problem.cost_t {
        TraceCost::Scalar(c) => {
            let mut v = vec![ZERO; q_dim];
            v[0] = C64::new(c * q_dim as f64, 0.0);
            v
        }
        TraceCost::Weighted(w) => diag_sum(w.as_ref()),
    };
    let t_counts: Vec<f64> = (0..n)
        .map(|k| if k == 0 { n as f64 } else { 2.0 * (n - k) as f64 })
        .collect();
    let is_obs = {
        let mut v = vec![None; n];
        for (k, &o) in problem.observed.iter().enumerate() {
            v[o] = Some(k);
        }
        v
    };

    let mut x = Mat::<C64>::zeros(p, p);
    let mut z = Mat::<C64>::zeros(n, l);
    let mut u = vec![ZERO; n];
    let mut q2 = Mat::<C64>::zeros(q_dim, q_dim);
    let mut log = Vec::new();
    let (mut rp, mut rd) = (f64::INFINITY, f64::INFINITY);
    let mut iters = 0;
    let mut converged = false;

    for it in 1..=cfg.max_iters {
        iters = it;
        let inv_b = 1.0 / beta;
        let g = Mat::from_fn(d, d, |i, j| q[(i, j)] + lam[(i, j)] * inv_b);
        // X (or Q₁)
        x = Mat::from_fn(p, p, |i, j| {
            let v = (g[(i, j)] + g[(j, i)].conj()) * 0.5;
            if i == j {
                v - problem.cost_x * inv_b
            } else {
                v
            }
        });
        let g21 = Mat::from_fn(q_dim, p, |i, j| (g[(p + i, j)] + g[(j, p + i)].conj()) * 0.5);
        let block_low: CMat;
        match problem.kind {
            BlockKind::Toeplitz { .. } => {
                // Z: free rows copy G₂₁, observed rows go through the data set.
                let w1 = vec![1.0; problem.observed.len() * l];
                let mut h = Vec::with_capacity(problem.observed.len() * l);
                let mut yv = Vec::with_capacity(problem.observed.len() * l);
                for (k, &o) in problem.observed.iter().enumerate() {
                    for t in 0..l {
                        h.push(g21[(o, t)]);
                        yv.push(sc.data[(k, t)]);
                    }
                }
                let zo = data_update(&h, &w1, &yv, sc.mode, beta);
                z = Mat::from_fn(n, l, |i, t| match is_obs[i] {
                    Some(k) => zo[k * l + t],
                    None => g21[(i, t)],
                });
                // u from the Toeplitz adjoint.
                let g22 = g.submatrix(p, p, n, n);
                let ds = diag_sum(g22);
                u = (0..n)
                    .map(|k| (ds[k] - w_adj[k] * inv_b) / t_counts[k])
                    .collect();
                u[0].im = 0.0;
                block_low = toeplitz(&u);
            }
            BlockKind::Hankel { m, .. } => {
                let counts = hankel_counts(n, m);
                let hsum = hankel_adjoint(g21.as_ref(), n, l);
                let hbar = Mat::from_fn(n, l, |i, t| hsum[(i, t)] / counts[i]);
                let mut h = Vec::new();
                let mut w = Vec::new();
                let mut yv = Vec::new();
                for (k, &o) in problem.observed.iter().enumerate() {
                    for t in 0..l {
                        h.push(hbar[(o, t)]);
                        w.push(counts[o]);
                        yv.push(sc.data[(k, t)]);
                    }
                }
                let zo = data_update(&h, &w, &yv, sc.mode, beta);
                z = Mat::from_fn(n, l, |i, t| match is_obs[i] {
                    Some(k) => zo[k * l + t],
                    None => hbar[(i, t)],
                });
                let c2 = match problem.cost_t {
                    TraceCost::Scalar(c) => c,
                    TraceCost::Weighted(_) => unreachable!(),
                };
                q2 = Mat::from_fn(m, m, |i, j| {
                    let v = (g[(p + i, p + j)] + g[(p + j, p + i)].conj()) * 0.5;
                    if i == j {
                        v - c2 * inv_b
                    } else {
                        v
                    }
                });
                block_low = q2.clone();
            }
        }
        let zlift = match problem.kind {
            BlockKind::Toeplitz { .. } => z.clone(),
            BlockKind::Hankel { m, .. } => hankel_lift(z.as_ref(), m)?,
        };
        let b = Mat::from_fn(d, d, |i, j| match (i < p, j < p) {
            (true, true) => x[(i, j)],
            (true, false) => zlift[(j - p, i)].conj(),
            (false, true) => zlift[(i - p, j)],
            (false, false) => block_low[(i - p, j - p)],
        });
        let a = cfg.relax;
        let bh = Mat::from_fn(d, d, |i, j| b[(i, j)] * a + q[(i, j)] * (1.0 - a));
        let target = Mat::from_fn(d, d, |i, j| bh[(i, j)] - lam[(i, j)] * inv_b);
        let q_new = psd_split(target.as_ref());
        let mut rp2 = 0.0;
        let mut rd2 = 0.0;
        for j in 0..d {
            for i in 0..d {
                lam[(i, j)] += (q_new[(i, j)] - bh[(i, j)]) * beta;
                rp2 += (q_new[(i, j)] - b[(i, j)]).norm_sqr();
                rd2 += (q_new[(i, j)] - q[(i, j)]).norm_sqr();
            }
        }
        q = q_new;
        let bn = b.norm_l2();
        let qn = q.norm_l2();
        let ln = lam.norm_l2();
        rp = rp2.sqrt() / bn.max(qn).max(1e-300);
        rd = beta * rd2.sqrt() / ln.max(1e-300);
        if cfg.log {
            let obj = scale
                * problem_scaled_objective(problem, &sc, x.as_ref(), &u, q2.as_ref(), z.as_ref());
            log.push(IterLog {
                iter: it,
                objective: obj,
                primal_res: rp,
                dual_res: rd,
            });
        }
        if rp < cfg.tol_primal && rd < cfg.tol_dual {
            converged = true;
            break;
        }
        if cfg.adapt && it % 10 == 0 {
            if rp > 10.0 * rd {
                beta *= 2.0;
            } else if rd > 10.0 * rp {
                beta /= 2.0;
            }
        }
    }

    let x_out = linalg::scale(x.as_ref(), scale);
    let z_out = linalg::scale(z.as_ref(), scale);
    let (u_out, q2_out) = match problem.kind {
        BlockKind::Toeplitz { .. } => (u.iter().map(|v| v * scale).collect(), None),
        BlockKind::Hankel { .. } => (Vec::new(), Some(linalg::scale(q2.as_ref(), scale))),
    };
    let objective = problem.objective(x_out.as_ref(), &u_out, q2_out.as_ref().map(|q| q.as_ref()), z_out.as_ref());
    Ok(SdpSolution {
        u: u_out,
        z: z_out,
        x: x_out,
        q2: q2_out,
        objective,
        primal_residual: rp,
        dual_residual: rd,
        iterations: iters,
        converged,
        log,
        warm: Some(WarmStart {
            q,
            lambda: lam,
            beta,
            scale,
        }),
    })
}

fn problem_scaled_objective(
    problem: &BlockSdpProblem,
    sc: &Scaled,
    x: MatRef<'_, C64>,
    u: &[C64],
    q2: MatRef<'_, C64>,
    z: MatRef<'_, C64>,
) -> f64 {
    let scaled = BlockSdpProblem {
        kind: problem.kind,
        observed: problem.observed.clone(),
        data: sc.data.clone(),
        mode: sc.mode,
        cost_x: problem.cost_x,
        cost_t: problem.cost_t.clone(),
    };
    let q2 = match problem.kind {
        BlockKind::Hankel { .. } => Some(q2),
        BlockKind::Toeplitz { .. } => None,
    };
    scaled.objective(x, u, q2, z)
}

fn zero_solution(problem: &BlockSdpProblem) -> SdpSolution {
    let n = problem.n_signal();
    let l = problem.l();
    let (p, u, q2) = match problem.kind {
        BlockKind::Toeplitz { n } => (l, vec![ZERO; n], None),
        BlockKind::Hankel { n, m } => ((n + 1 - m) * l, Vec::new(), Some(Mat::zeros(m, m))),
    };
    SdpSolution {
        u,
        z: Mat::zeros(n, l),
        x: Mat::zeros(p, p),
        q2,
        objective: 0.0,
        primal_residual: 0.0,
        dual_residual: 0.0,
        iterations: 0,
        converged: true,
        log: Vec::new(),
        warm: None,
    }
}

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues set to zero).
pub fn psd_project(h: MatRef<'_, C64>) -> CMat {
    linalg::psd_project(h)
}
