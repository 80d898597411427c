//! Gridless estimators built on the PSD-block ADMM engine: atomic norm minimization,
//! gridless SPICE, weighted and reweighted atomic norms, Hankel nuclear norm (EMaC),
//! covariance-domain pipelines and the snapshot-reduction transform.

use crate::array_model::{steering_matrix, ArrayGeometry};
use crate::error::{DoaError, Result};
use crate::linalg::{self, herm_eig, psd_sqrt, CMat, C64};
use crate::sdp_admm::{
    admm_solve, admm_solve_warm, AdmmConfig, BlockKind, BlockSdpProblem, DataMode, SdpSolution,
    TraceCost,
};
use crate::signal_sim::{coarray_average, hankel_lift, sample_covariance, toeplitz, virtual_snapshot};
use crate::spectrum::{
    model_order, music, noise_split_decompose, vandermonde_decompose_with, LineSpectrum,
    ModelOrder, MusicOptions,
};
use faer::{Mat, MatRef};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Atoms below this fraction of the strongest power are dropped.
pub const PRUNE_REL: f64 = 1e-6;
/// Relative eigenvalue threshold used when decomposing solver output.
pub const RETRIEVAL_RANK_TOL: f64 = 1e-5;
const RETRIEVAL_PSD_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnmMode {
    Exact,
    Ball(f64),
    Regularized(f64),
}

#[derive(Clone, Debug)]
pub struct GridlessResult {
    pub spectrum: LineSpectrum,
    pub solution: SdpSolution,
    /// Eigen-gap order estimate on T(û), for methods that do not assume K.
    pub order: Option<ModelOrder>,
}

struct Layout {
    n: usize,
    pos: Vec<usize>,
}

fn layout(geom: &ArrayGeometry, y: MatRef<'_, C64>) -> Result<Layout> {
    geom.require_linear()?;
    let pos = geom.positions()?;
    if y.nrows() != pos.len() {
        return Err(DoaError::Dimension(format!(
            "data has {} rows, array has {} sensors",
            y.nrows(),
            pos.len()
        )));
    }
    if y.ncols() == 0 {
        return Err(DoaError::Dimension("data needs at least one snapshot".into()));
    }
    Ok(Layout { n: geom.n(), pos })
}

fn data_mode(mode: AnmMode) -> Result<(DataMode, f64)> {
    match mode {
        AnmMode::Exact => Ok((DataMode::Equality, 1.0)),
        AnmMode::Ball(eta) if eta >= 0.0 => Ok((DataMode::Ball(eta), 1.0)),
        AnmMode::Regularized(lam) if lam > 0.0 => Ok((DataMode::Quadratic(1.0), lam)),
        _ => Err(DoaError::Domain("eta must be >= 0 and lambda > 0".into())),
    }
}

/// An unconverged iterate can leave T(u) indefinite; it is then shifted by its smallest
/// eigenvalue so a partial answer can still be reported.
fn retrieve(t: MatRef<'_, C64>, power_scale: f64) -> Result<LineSpectrum> {
    let mut s = match vandermonde_decompose_with(t, RETRIEVAL_RANK_TOL, RETRIEVAL_PSD_TOL) {
        Err(DoaError::Domain(_)) => {
            let lmin = linalg::herm_eigenvalues(t)[0];
            let shifted = Mat::from_fn(t.nrows(), t.ncols(), |i, j| {
                if i == j {
                    t[(i, j)] - lmin
                } else {
                    t[(i, j)]
                }
            });
            vandermonde_decompose_with(shifted.as_ref(), RETRIEVAL_RANK_TOL, RETRIEVAL_PSD_TOL)?
        }
        other => other?,
    };
    for p in &mut s.powers {
        *p *= power_scale;
    }
    Ok(s.pruned(PRUNE_REL))
}

fn eig_order(t: MatRef<'_, C64>) -> Option<ModelOrder> {
    let mut ev = linalg::herm_eigenvalues(t);
    ev.reverse();
    for v in &mut ev {
        *v = v.max(0.0);
    }
    model_order(&ev).ok()
}

/// Any Ỹ with ỸỸᴴ = YYᴴ and at most min(M, L) columns: Y itself when L ≤ M,
/// otherwise (YYᴴ)^{1/2}.
pub fn reduce_snapshots_gridless(y: MatRef<'_, C64>) -> CMat {
    if y.ncols() <= y.nrows() {
        return y.to_owned();
    }
    let g = y * y.adjoint();
    psd_sqrt(linalg::hermitian_part(g.as_ref()).as_ref())
}

/// Q with QᴴQ = I and YQ = Ỹ for Ỹ = (YYᴴ)^{1/2}; `None` when Y lacks full row rank.
pub fn snapshot_rotation(y: MatRef<'_, C64>) -> Option<CMat> {
    let g = linalg::hermitian_part((y * y.adjoint()).as_ref());
    let e = herm_eig(g.as_ref());
    let lmax = e.values.last().copied().unwrap_or(0.0);
    if lmax <= 0.0 || e.values[0] <= 1e-12 * lmax {
        return None;
    }
    let inv_sqrt = linalg::rebuild(&e, |l| 1.0 / l.sqrt());
    Some(y.adjoint() * inv_sqrt)
}

/// Maps a solution of the reduced problem back to the original snapshots: (Q X̂ Qᴴ, Ẑ Qᴴ).
pub fn lift_reduced_solution(sol: &SdpSolution, q: MatRef<'_, C64>) -> (CMat, CMat) {
    let x = q * &sol.x * q.adjoint();
    let z = &sol.z * q.adjoint();
    (x, z)
}

/// Atomic norm minimization. SMV problems use the ½x + ½u₁ scaling so the objective is the
/// atomic norm and the Toeplitz powers are the amplitudes |c_k|; MMV problems use the
/// 1/(2√N) scaling and powers are rescaled to the row norms ‖s_k‖. Snapshots beyond M are
/// reduced first, so `solution.x`/`solution.z` live in the reduced coordinates.
pub fn anm(
    y: MatRef<'_, C64>,
    geom: &ArrayGeometry,
    mode: AnmMode,
    cfg: &AdmmConfig,
) -> Result<GridlessResult> {
    let lay = layout(geom, y)?;
    let n = lay.n;
    let (dm, lam) = data_mode(mode)?;
    let smv = y.ncols() == 1;
    let data = reduce_snapshots_gridless(y);
    let (cx, ct, pscale) = if smv {
        (0.5, 0.5 / n as f64, 1.0)
    } else {
        let c = 0.5 / (n as f64).sqrt();
        (c, c, (n as f64).sqrt())
    };
    let problem = BlockSdpProblem {
        kind: BlockKind::Toeplitz { n },
        observed: lay.pos.clone(),
        data,
        mode: dm,
        cost_x: lam * cx,
        cost_t: TraceCost::Scalar(lam * ct),
    };
    let solution = admm_solve(&problem, cfg)?;
    let spectrum = retrieve(solution.t().as_ref(), pscale)?;
    Ok(GridlessResult {
        spectrum,
        solution,
        order: None,
    })
}

/// Weighted atomic norm with w(f) = (a(f)ᴴ W a(f))^{−1/2}:
/// min (√N/2) tr(W T(u)) + (1/(2√N)) tr(X). Powers are the raw Toeplitz powers.
pub fn weighted_anm(
    y: MatRef<'_, C64>,
    geom: &ArrayGeometry,
    w: MatRef<'_, C64>,
    mode: AnmMode,
    cfg: &AdmmConfig,
) -> Result<GridlessResult> {
    let lay = layout(geom, y)?;
    let n = lay.n;
    if w.nrows() != n || w.ncols() != n {
        return Err(DoaError::Dimension("weight must be N×N".into()));
    }
    let (dm, lam) = data_mode(mode)?;
    let sn = (n as f64).sqrt();
    let problem = BlockSdpProblem {
        kind: BlockKind::Toeplitz { n },
        observed: lay.pos.clone(),
        data: reduce_snapshots_gridless(y),
        mode: dm,
        cost_x: lam * 0.5 / sn,
        cost_t: TraceCost::Weighted(linalg::scale(
            linalg::hermitian_part(w).as_ref(),
            lam * 0.5 * sn,
        )),
    };
    let solution = admm_solve(&problem, cfg)?;
    let spectrum = retrieve(solution.t().as_ref(), 1.0)?;
    Ok(GridlessResult {
        spectrum,
        solution,
        order: None,
    })
}

/// Capon weight R̃⁻¹/N lifted to the virtual ULA (Γᵀ R̃_Ω⁻¹ Γ / N).
pub fn capon_weight(r: MatRef<'_, C64>, geom: &ArrayGeometry) -> Result<CMat> {
    let pos = geom.positions()?;
    let n = geom.n();
    let rinv = linalg::hpd_inverse(r);
    Ok(lift_to_virtual(rinv.as_ref(), &pos, n, 1.0 / n as f64))
}

fn lift_to_virtual(a: MatRef<'_, C64>, pos: &[usize], n: usize, s: f64) -> CMat {
    let mut w = Mat::<C64>::zeros(n, n);
    for (i, &pi) in pos.iter().enumerate() {
        for (j, &pj) in pos.iter().enumerate() {
            w[(pi, pj)] = a[(i, j)] * s;
        }
    }
    w
}

/// Gridless SPICE. With L ≥ M and a nonsingular sample covariance the fit uses the
/// R̃^{1/2} block and weight Γᵀ R̃⁻¹ Γ; otherwise the singular-case criterion with the
/// reduced data (1/L)Y(YᴴY)^{1/2} (L < M) or R̃ (L ≥ M). SLA blocks are handled by
/// completing the unobserved rows of Z. Retrieval splits off σ̂ = λ_min(T(û)).
pub fn gls(y: MatRef<'_, C64>, geom: &ArrayGeometry, cfg: &AdmmConfig) -> Result<GridlessResult> {
    let lay = layout(geom, y)?;
    let (m, l, n) = (y.nrows(), y.ncols(), lay.n);
    let r = sample_covariance(y);
    let ev = linalg::herm_eigenvalues(r.as_ref());
    let lmax = ev.last().copied().unwrap_or(0.0);
    let nonsingular = l >= m && lmax > 0.0 && ev[0] > 1e-10 * lmax;
    let ones = {
        let mut d = Mat::<C64>::zeros(n, n);
        for &p in &lay.pos {
            d[(p, p)] = C64::new(1.0, 0.0);
        }
        d
    };
    let (data, w) = if nonsingular {
        let rinv = linalg::hpd_inverse(r.as_ref());
        (psd_sqrt(r.as_ref()), lift_to_virtual(rinv.as_ref(), &lay.pos, n, 1.0))
    } else if l < m {
        let g = linalg::hermitian_part((y.adjoint() * y).as_ref());
        (linalg::scale((y * psd_sqrt(g.as_ref())).as_ref(), 1.0 / l as f64), ones)
    } else {
        (r.clone(), ones)
    };
    let problem = BlockSdpProblem {
        kind: BlockKind::Toeplitz { n },
        observed: lay.pos.clone(),
        data,
        mode: DataMode::Equality,
        cost_x: 1.0,
        cost_t: TraceCost::Weighted(w),
    };
    let solution = admm_solve(&problem, cfg)?;
    let t = solution.t();
    let mut spectrum = noise_split_decompose(t.as_ref(), RETRIEVAL_RANK_TOL)?.pruned(PRUNE_REL);
    if spectrum.len() > n.saturating_sub(1) {
        spectrum = spectrum.strongest(n - 1);
    }
    Ok(GridlessResult {
        order: eig_order(t.as_ref()),
        spectrum,
        solution,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RamConfig {
    /// Initial ε; `None` uses ‖Y‖²_F/(N·L).
    pub epsilon0: Option<f64>,
    pub decay: f64,
    /// Number of weighted solves, the first of which is plain ANM.
    pub outer_iters: usize,
}

impl Default for RamConfig {
    fn default() -> Self {
        RamConfig {
            epsilon0: None,
            decay: 0.1,
            outer_iters: 4,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RamStep {
    pub iter: usize,
    pub epsilon: f64,
    /// Surrogate log|T+εI| + tr X at the previous iterate and at the new one (same ε).
    pub before: f64,
    pub after: f64,
    pub accepted: bool,
}

impl RamStep {
    /// Surrogate value of the iterate kept after this step.
    pub fn value(&self) -> f64 {
        if self.accepted {
            self.after
        } else {
            self.before
        }
    }
}

#[derive(Clone, Debug)]
pub struct RamResult {
    pub spectrum: LineSpectrum,
    pub solution: SdpSolution,
    pub trace: Vec<RamStep>,
}

fn logdet_surrogate(sol: &SdpSolution, eps: f64) -> f64 {
    let t = sol.t();
    let ld: f64 = linalg::herm_eigenvalues(t.as_ref())
        .iter()
        .map(|&l| (l + eps).max(1e-300).ln())
        .sum();
    ld + linalg::trace(sol.x.as_ref()).re
}

/// Reweighted atomic norm minimization: repeated weighted solves with
/// W_j = (T(u_{j−1}) + ε_j I)⁻¹, starting from u₀ = 0 (plain ANM) and shrinking ε
/// geometrically. A step whose surrogate does not decrease at its own ε is rejected
/// and the previous iterate kept.
pub fn ram(
    y: MatRef<'_, C64>,
    geom: &ArrayGeometry,
    mode: AnmMode,
    ram_cfg: &RamConfig,
    cfg: &AdmmConfig,
) -> Result<RamResult> {
    let lay = layout(geom, y)?;
    let n = lay.n;
    let dm = match mode {
        AnmMode::Exact => DataMode::Equality,
        AnmMode::Ball(eta) if eta >= 0.0 => DataMode::Ball(eta),
        _ => {
            return Err(DoaError::Domain(
                "reweighting needs an exact or ball data constraint".into(),
            ))
        }
    };
    if !(ram_cfg.decay > 0.0 && ram_cfg.decay <= 1.0) || ram_cfg.outer_iters == 0 {
        return Err(DoaError::Domain("decay must lie in (0, 1] and outer_iters >= 1".into()));
    }
    let eps0 = match ram_cfg.epsilon0 {
        Some(e) if e > 0.0 => e,
        Some(_) => return Err(DoaError::Domain("epsilon0 must be > 0".into())),
        None => {
            let e = linalg::frob2(y) / (n * y.ncols()) as f64;
            if e == 0.0 {
                1.0
            } else {
                e
            }
        }
    };
    let data = reduce_snapshots_gridless(y);
    let mut problem = BlockSdpProblem {
        kind: BlockKind::Toeplitz { n },
        observed: lay.pos.clone(),
        data,
        mode: dm,
        cost_x: 1.0,
        cost_t: TraceCost::Scalar(1.0 / eps0),
    };
    let mut best = admm_solve(&problem, cfg)?;
    let mut trace = Vec::new();
    let mut eps = eps0;
    for j in 1..ram_cfg.outer_iters {
        eps *= ram_cfg.decay;
        let t = best.t();
        let shifted = Mat::from_fn(n, n, |a, b| {
            if a == b {
                t[(a, b)] + eps
            } else {
                t[(a, b)]
            }
        });
        problem.cost_t = TraceCost::Weighted(linalg::hpd_inverse(shifted.as_ref()));
        let cand = admm_solve_warm(&problem, cfg, best.warm.as_ref())?;
        let before = logdet_surrogate(&best, eps);
        let after = logdet_surrogate(&cand, eps);
        let accepted = after <= before;
        trace.push(RamStep {
            iter: j,
            epsilon: eps,
            before,
            after,
            accepted,
        });
        if accepted {
            best = cand;
        }
    }
    let spectrum = retrieve(best.t().as_ref(), 1.0)?;
    Ok(RamResult {
        spectrum,
        solution: best,
        trace,
    })
}

/// EMaC / M-EMaC: nuclear norm of the block Hankel lift H(Z) (m rows, default ⌈N/2⌉),
/// followed by shift-invariance retrieval on its dominant left singular subspace.
/// `order` fixes K; otherwise K is the numerical rank of H(Ẑ).
pub fn emac(
    y: MatRef<'_, C64>,
    geom: &ArrayGeometry,
    m: Option<usize>,
    mode: AnmMode,
    order: Option<usize>,
    cfg: &AdmmConfig,
) -> Result<GridlessResult> {
    let lay = layout(geom, y)?;
    let n = lay.n;
    let m = m.unwrap_or(n.div_ceil(2));
    if m < 2 || m > n {
        return Err(DoaError::Domain(format!("pencil m={m} must lie in 2..={n}")));
    }
    let (dm, lam) = data_mode(mode)?;
    let problem = BlockSdpProblem {
        kind: BlockKind::Hankel { n, m },
        observed: lay.pos.clone(),
        data: y.to_owned(),
        mode: dm,
        cost_x: 0.5 * lam,
        cost_t: TraceCost::Scalar(0.5 * lam),
    };
    let solution = admm_solve(&problem, cfg)?;
    let spectrum = hankel_retrieve(solution.z.as_ref(), m, order)?;
    Ok(GridlessResult {
        spectrum,
        solution,
        order: None,
    })
}

/// Frequencies from the column space of H(Z); powers are LS row norms ‖s_k‖ of Z on the
/// recovered atoms.
pub fn hankel_retrieve(z: MatRef<'_, C64>, m: usize, order: Option<usize>) -> Result<LineSpectrum> {
    let h = hankel_lift(z, m)?;
    let svd = linalg::thin_svd(h.as_ref());
    let s1 = svd.s.first().copied().unwrap_or(0.0);
    if s1 == 0.0 {
        return Ok(LineSpectrum::default());
    }
    let k = match order {
        Some(k) => k,
        None => svd.s.iter().filter(|&&s| s > RETRIEVAL_RANK_TOL * s1).count(),
    };
    let k = k.min(m - 1).min(svd.s.len());
    if k == 0 {
        return Ok(LineSpectrum::default());
    }
    let u = svd.u.subcols(0, k);
    let top = u.subrows(0, m - 1);
    let bot = u.subrows(1, m - 1);
    let phi = linalg::pinv(top, 1e-12) * bot;
    let mut freqs: Vec<f64> = linalg::eigenvalues(phi.as_ref())
        .iter()
        .map(|v| crate::array_model::wrap_freq(v.arg() / (2.0 * PI)))
        .collect();
    freqs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let nn = z.nrows();
    let a = steering_matrix(&(0..nn).collect::<Vec<_>>(), &freqs);
    let s = linalg::pinv(a.as_ref(), 1e-12) * z;
    let powers: Vec<f64> = linalg::row_norms2(s.as_ref()).iter().map(|v| v.sqrt()).collect();
    Ok(LineSpectrum {
        freqs,
        powers,
        sigma: None,
    }
    .pruned(PRUNE_REL))
}

/// Ball radius η = 2σ√((2N−1)/L) for the covariance-domain ANM; heuristic.
pub fn default_cov_eta(n: usize, l: usize, sigma: f64) -> f64 {
    2.0 * sigma * ((2 * n - 1) as f64 / l as f64).sqrt()
}

/// Covariance-domain ANM on a redundancy array: R̃_Ω − σI is coarray-averaged into ũ,
/// mirrored into the virtual (2N−1)-element snapshot ṽ, and denoised by SMV ANM within
/// a ball of radius η.
pub fn anm_smv_cov(
    r: MatRef<'_, C64>,
    geom: &ArrayGeometry,
    sigma: f64,
    eta: f64,
    cfg: &AdmmConfig,
) -> Result<GridlessResult> {
    geom.require_linear()?;
    if sigma < 0.0 || eta < 0.0 {
        return Err(DoaError::Domain("sigma and eta must be >= 0".into()));
    }
    let shifted = Mat::from_fn(r.nrows(), r.ncols(), |i, j| {
        if i == j {
            r[(i, j)] - sigma
        } else {
            r[(i, j)]
        }
    });
    let u = coarray_average(shifted.as_ref(), geom)?;
    let v = virtual_snapshot(&u);
    let vgeom = ArrayGeometry::ula(v.len())?;
    let mode = if eta == 0.0 {
        AnmMode::Exact
    } else {
        AnmMode::Ball(eta)
    };
    anm(linalg::from_col(&v).as_ref(), &vgeom, mode, cfg)
}

/// Nearest-in-nuclear-norm Hermitian matrix within a Frobenius ball of radius η around T:
/// eigenvalues are soft-thresholded by the level τ that puts the result on the ball.
pub fn nnm_denoise(t: MatRef<'_, C64>, eta: f64) -> Result<CMat> {
    if eta < 0.0 {
        return Err(DoaError::Domain("eta must be >= 0".into()));
    }
    let t = linalg::hermitian_part(t);
    if eta == 0.0 {
        return Ok(t);
    }
    let e = herm_eig(t.as_ref());
    let total: f64 = e.values.iter().map(|l| l * l).sum();
    if total <= eta * eta {
        return Ok(Mat::zeros(t.nrows(), t.ncols()));
    }
    let dist2 = |tau: f64| -> f64 { e.values.iter().map(|l| l.abs().min(tau).powi(2)).sum() };
    let (mut lo, mut hi) = (0.0, e.values.iter().fold(0.0f64, |a, b| a.max(b.abs())));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dist2(mid) > eta * eta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    Ok(linalg::rebuild(&e, |l| l.signum() * (l.abs() - tau).max(0.0)))
}

/// NNM followed by MUSIC: coarray-averaged T(ũ) is denoised by [`nnm_denoise`] and
/// handed to MUSIC with model order `k`.
pub fn nnm_music(
    r: MatRef<'_, C64>,
    geom: &ArrayGeometry,
    eta: f64,
    k: usize,
) -> Result<LineSpectrum> {
    let u = coarray_average(r, geom)?;
    let t = toeplitz(&u);
    let denoised = nnm_denoise(t.as_ref(), eta)?;
    music(denoised.as_ref(), k, MusicOptions::default())
}

/// Regularization weight for the ½‖Z_Ω − Y_Ω‖² + λ‖Z‖_A formulation; `sigma` is the noise
/// variance. SMV: √(M log M σ) on a ULA, √(M log N σ) on an SLA. MMV:
/// √(M(L + log M + √(2L log M)) σ), with log N in place of log M on an SLA.
pub fn default_lambda(m: usize, n: usize, l: usize, sigma: f64) -> Result<f64> {
    if sigma <= 0.0 || sigma.is_nan() {
        return Err(DoaError::Domain("sigma must be > 0".into()));
    }
    if m == 0 || n < m || l == 0 {
        return Err(DoaError::Domain("need 1 <= M <= N and L >= 1".into()));
    }
    let (mf, lf) = (m as f64, l as f64);
    let lg = if m == n { mf.ln() } else { (n as f64).ln() };
    Ok(if l == 1 {
        (mf * lg * sigma).sqrt()
    } else {
        (mf * (lf + lg + (2.0 * lf * lg).sqrt()) * sigma).sqrt()
    })
}

/// Brute-force atomic ℓ0 fit on a grid: the smallest K ≤ `k_max` for which some K-subset
/// of `grid` reproduces `y` (rows at `pos`) with relative LS residual ≤ `rtol`, together
/// with the chosen frequencies. Exponential in K; meant for tiny instances.
pub fn atomic_l0_oracle(
    y: MatRef<'_, C64>,
    pos: &[usize],
    grid: &[f64],
    k_max: usize,
    rtol: f64,
) -> Option<(usize, Vec<f64>)> {
    let ynorm = y.norm_l2();
    if ynorm == 0.0 {
        return Some((0, Vec::new()));
    }
    let a_full = steering_matrix(pos, grid);
    for k in 1..=k_max.min(grid.len()) {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let a = Mat::from_fn(pos.len(), k, |i, j| a_full[(i, idx[j])]);
            let coef = linalg::pinv(a.as_ref(), 1e-10) * y;
            let resid = (y - &a * &coef).norm_l2();
            if resid <= rtol * ynorm {
                return Some((k, idx.iter().map(|&i| grid[i]).collect()));
            }
            if !next_combination(&mut idx, grid.len()) {
                break;
            }
        }
    }
    None
}

/// Advances `idx` to the next k-subset of 0..n in lexicographic order.
pub fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
