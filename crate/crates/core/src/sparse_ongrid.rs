//! On-grid joint-sparse solvers over a fixed dictionary: ℓ2,1 LASSO and BPDN,
//! reweighted ℓ2,q (M-FOCUSS, SLIM), SPICE, EM maximum likelihood, and the two
//! snapshot-reduction transforms.
//!
//! All solvers take the dictionary as a plain matrix so that steering
//! dictionaries, Taylor-expanded dictionaries and synthetic ones share one path.

use crate::error::{DoaError, Result};
use crate::linalg::{self, herm_eig, hpd_solve, inner_re, row_norms2, CMat, C64, ZERO};
use crate::signal_sim::sample_covariance;
use faer::{Mat, MatRef};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSolverConfig {
    pub max_iters: usize,
    /// LASSO: KKT residual relative to λ. Reweighted solvers: relative objective change.
    pub tol: f64,
    /// Rows with power below this fraction of the largest are outside the support.
    pub epsilon_floor: f64,
}

impl Default for GridSolverConfig {
    fn default() -> Self {
        GridSolverConfig {
            max_iters: 20_000,
            tol: 1e-6,
            epsilon_floor: 1e-6,
        }
    }
}

impl GridSolverConfig {
    pub fn with_tol(tol: f64) -> Self {
        GridSolverConfig {
            tol,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 || !(self.tol > 0.0) || !(self.epsilon_floor >= 0.0) {
            return Err(DoaError::Config(
                "max_iters ≥ 1, tol > 0 and epsilon_floor ≥ 0 required".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct RowSparseSolution {
    pub x: CMat,
    /// ‖X_n‖² / L.
    pub row_powers: Vec<f64>,
    pub support: Vec<usize>,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Regularization actually used (the bisected value for BPDN).
    pub lambda: Option<f64>,
    /// Worst group optimality violation relative to λ, for the convex solvers.
    pub kkt_residual: Option<f64>,
}

impl RowSparseSolution {
    fn build(x: CMat, trace: Vec<f64>, iterations: usize, converged: bool, floor: f64) -> Self {
        let l = x.ncols().max(1) as f64;
        let row_powers: Vec<f64> = row_norms2(x.as_ref()).into_iter().map(|p| p / l).collect();
        let support = support_of(&row_powers, floor);
        RowSparseSolution {
            x,
            row_powers,
            support,
            objective_trace: trace,
            iterations,
            converged,
            lambda: None,
            kkt_residual: None,
        }
    }

    pub fn final_objective(&self) -> f64 {
        self.objective_trace.last().copied().unwrap_or(0.0)
    }
}

/// Indices with power above `floor` times the maximum.
pub fn support_of(powers: &[f64], floor: f64) -> Vec<usize> {
    let pmax = powers.iter().cloned().fold(0.0, f64::max);
    if pmax <= 0.0 {
        return Vec::new();
    }
    (0..powers.len())
        .filter(|&n| powers[n] > floor * pmax)
        .collect()
}

fn check_dims(y: MatRef<'_, C64>, a: MatRef<'_, C64>) -> Result<()> {
    if y.nrows() != a.nrows() {
        return Err(DoaError::Dimension(format!(
            "data has {} rows, dictionary has {}",
            y.nrows(),
            a.nrows()
        )));
    }
    if y.ncols() == 0 || a.ncols() == 0 {
        return Err(DoaError::Dimension("empty data or dictionary".into()));
    }
    Ok(())
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(DoaError::Domain(format!("q must lie in (0, 1], got {q}")));
    }
    Ok(())
}

fn residual2(a: MatRef<'_, C64>, x: &CMat, y: MatRef<'_, C64>) -> f64 {
    let ax = a * x;
    let mut s = 0.0;
    for j in 0..y.ncols() {
        for i in 0..y.nrows() {
            s += (ax[(i, j)] - y[(i, j)]).norm_sqr();
        }
    }
    s
}

/// Row groups: plain rows, or rows n and n + offset taken together.
#[derive(Clone, Copy)]
pub(crate) enum Groups {
    Rows,
    Paired(usize),
}

impl Groups {
    fn count(self, nrows: usize) -> usize {
        match self {
            Groups::Rows => nrows,
            Groups::Paired(off) => off,
        }
    }

    fn members(self, g: usize) -> ([usize; 2], usize) {
        match self {
            Groups::Rows => ([g, g], 1),
            Groups::Paired(off) => ([g, g + off], 2),
        }
    }

    fn norm(self, x: &CMat, g: usize) -> f64 {
        let (rows, k) = self.members(g);
        let mut s = 0.0;
        for &r in &rows[..k] {
            for j in 0..x.ncols() {
                s += x[(r, j)].norm_sqr();
            }
        }
        s.sqrt()
    }

    fn sum_norms(self, x: &CMat) -> f64 {
        (0..self.count(x.nrows())).map(|g| self.norm(x, g)).sum()
    }
}

fn group_shrink(v: &mut CMat, tau: f64, groups: Groups) {
    for g in 0..groups.count(v.nrows()) {
        let nrm = groups.norm(v, g);
        let f = if nrm > tau { 1.0 - tau / nrm } else { 0.0 };
        let (rows, k) = groups.members(g);
        for &r in &rows[..k] {
            for j in 0..v.ncols() {
                v[(r, j)] *= f;
            }
        }
    }
}

/// max over groups of the optimality violation relative to λ, given g = Aᴴ(Y − AX).
fn kkt_violation(x: &CMat, g: &CMat, lambda: f64, groups: Groups) -> f64 {
    let mut worst: f64 = 0.0;
    for grp in 0..groups.count(x.nrows()) {
        let xn = groups.norm(x, grp);
        let (rows, k) = groups.members(grp);
        let v = if xn > 0.0 {
            let mut s = 0.0;
            for &r in &rows[..k] {
                for j in 0..x.ncols() {
                    s += (g[(r, j)] - x[(r, j)] * (lambda / xn)).norm_sqr();
                }
            }
            s.sqrt() / lambda
        } else {
            (groups.norm(g, grp) / lambda - 1.0).max(0.0)
        };
        worst = worst.max(v);
    }
    worst
}

/// Accelerated proximal gradient for λ Σ_g ‖X_g‖ + ½‖AX − Y‖²_F with adaptive restart.
pub(crate) fn group_lasso(
    y: MatRef<'_, C64>,
    a: MatRef<'_, C64>,
    lambda: f64,
    groups: Groups,
    cfg: &GridSolverConfig,
    warm: Option<&CMat>,
) -> Result<RowSparseSolution> {
    check_dims(y, a)?;
    cfg.validate()?;
    if !(lambda > 0.0) {
        return Err(DoaError::Domain(format!("λ must be positive, got {lambda}")));
    }
    let (n, l) = (a.ncols(), y.ncols());
    let ah = a.adjoint().to_owned();
    let gram = &ah * a;
    let b = &ah * y;
    let objective = |x: &CMat| lambda * groups.sum_norms(x) + 0.5 * residual2(a, x, y);

    let zero = linalg::zeros(n, l);
    if (0..groups.count(n)).all(|g| groups.norm(&b, g) <= lambda) {
        let mut sol = RowSparseSolution::build(zero.clone(), vec![objective(&zero)], 0, true, cfg.epsilon_floor);
        sol.lambda = Some(lambda);
        sol.kkt_residual = Some(kkt_violation(&zero, &b, lambda, groups));
        return Ok(sol);
    }

    let lip = linalg::spectral_norm(a).powi(2);
    let step = 1.0 / lip;
    let mut x = match warm {
        Some(w) if w.nrows() == n && w.ncols() == l => w.clone(),
        _ => zero,
    };
    let mut z = x.clone();
    let mut t: f64 = 1.0;
    let mut trace = vec![objective(&x)];
    let mut converged = false;
    let mut kkt = f64::INFINITY;
    let mut iters = 0;
    for k in 1..=cfg.max_iters {
        iters = k;
        let gz = &gram * &z;
        let mut v = Mat::from_fn(n, l, |i, j| z[(i, j)] - (gz[(i, j)] - b[(i, j)]) * step);
        group_shrink(&mut v, lambda * step, groups);
        let xn = v;
        let diff = &xn - &x;
        let zx = &z - &xn;
        if inner_re(zx.as_ref(), diff.as_ref()) > 0.0 {
            t = 1.0;
            z = xn.clone();
        } else {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let mom = (t - 1.0) / t_next;
            z = Mat::from_fn(n, l, |i, j| xn[(i, j)] + diff[(i, j)] * mom);
            t = t_next;
        }
        x = xn;
        trace.push(objective(&x));
        if k % 10 == 0 || k == cfg.max_iters {
            let g = &b - &gram * &x;
            kkt = kkt_violation(&x, &g, lambda, groups);
            if kkt <= cfg.tol {
                converged = true;
                break;
            }
        }
    }
    let mut sol = RowSparseSolution::build(x, trace, iters, converged, cfg.epsilon_floor);
    sol.lambda = Some(lambda);
    sol.kkt_residual = Some(kkt);
    Ok(sol)
}

/// min λ‖X‖₂,₁ + ½‖AX − Y‖²_F.
pub fn l21_lasso(
    y: MatRef<'_, C64>,
    a: MatRef<'_, C64>,
    lambda: f64,
    cfg: &GridSolverConfig,
) -> Result<RowSparseSolution> {
    group_lasso(y, a, lambda, Groups::Rows, cfg, None)
}

/// Smallest achievable ‖AX − Y‖_F, i.e. the distance from Y to range(A).
fn range_distance(y: MatRef<'_, C64>, a: MatRef<'_, C64>) -> f64 {
    let p = linalg::pinv(a, 1e-12);
    let x = &p * y;
    residual2(a, &x, y).sqrt()
}

/// min ‖X‖₂,₁ subject to ‖AX − Y‖_F ≤ η.
///
/// η > 0 bisects λ on the LASSO path until the residual hits η within tol.
/// η = 0 solves the equality-constrained program by ADMM.
pub fn l21_bpdn(
    y: MatRef<'_, C64>,
    a: MatRef<'_, C64>,
    eta: f64,
    cfg: &GridSolverConfig,
) -> Result<RowSparseSolution> {
    check_dims(y, a)?;
    cfg.validate()?;
    if !(eta >= 0.0) {
        return Err(DoaError::Domain(format!("η must be nonnegative, got {eta}")));
    }
    bpdn_grouped(y, a, eta, Groups::Rows, cfg)
}

pub(crate) fn bpdn_grouped(
    y: MatRef<'_, C64>,
    a: MatRef<'_, C64>,
    eta: f64,
    groups: Groups,
    cfg: &GridSolverConfig,
) -> Result<RowSparseSolution> {
    let ynorm = y.norm_l2();
    let (n, l) = (a.ncols(), y.ncols());
    if eta >= ynorm {
        let zero = linalg::zeros(n, l);
        let mut sol = RowSparseSolution::build(zero, vec![0.0], 0, true, cfg.epsilon_floor);
        sol.lambda = Some(f64::INFINITY);
        return Ok(sol);
    }
    let floor = range_distance(y, a);
    if eta == 0.0 || eta <= floor * (1.0 + 1e-9) {
        if floor > 1e-10 * ynorm {
            return Err(DoaError::Infeasible(format!(
                "η = {eta} is below the distance {floor} from the data to the dictionary range"
            )));
        }
        if eta == 0.0 {
            return equality_group_basis_pursuit(y, a, groups, cfg);
        }
    }

    let ah = a.adjoint().to_owned();
    let b = &ah * y;
    let mut hi = (0..groups.count(n)).map(|g| groups.norm(&b, g)).fold(0.0, f64::max);
    let mut lo = hi * 1e-10;
    let mut warm: Option<CMat> = None;
    let mut best: Option<RowSparseSolution> = None;
    for _ in 0..200 {
        let lam = (lo * hi).sqrt();
        let sol = group_lasso(y, a, lam, groups, cfg, warm.as_ref())?;
        let res = residual2(a, &sol.x, y).sqrt();
        warm = Some(sol.x.clone());
        let ok = (res - eta).abs() <= cfg.tol * eta;
        if res > eta {
            hi = lam;
        } else {
            lo = lam;
        }
        if ok {
            return Ok(sol);
        }
        if res <= eta {
            best = Some(sol);
        }
        if hi / lo < 1.0 + 1e-14 {
            break;
        }
    }
    best.ok_or_else(|| DoaError::Infeasible("bisection found no feasible λ".into()))
}

/// min Σ_g ‖X_g‖ subject to AX = Y, by ADMM with an affine projection.
fn equality_group_basis_pursuit(
    y: MatRef<'_, C64>,
    a: MatRef<'_, C64>,
    groups: Groups,
    cfg: &GridSolverConfig,
) -> Result<RowSparseSolution> {
    let (n, l) = (a.ncols(), y.ncols());
    let scale = y.norm_l2();
    let ys = linalg::scale(y, 1.0 / scale);
    let ap = linalg::pinv(a, 1e-12);
    let project = |v: &CMat| -> CMat {
        let r = &(a * v) - &ys;
        v - &ap * &r
    };
    let x_ln = &ap * &ys;
    let mut z = x_ln.clone();
    let mut u = linalg::zeros(n, l);
    let mut rho = 1.0;
    let mut x = z.clone();
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iters = 0;
    for k in 1..=cfg.max_iters {
        iters = k;
        let mut v = &z - &u;
        group_shrink(&mut v, 1.0 / rho, groups);
        x = v;
        let z_old = z.clone();
        z = project(&(&x + &u));
        u = &u + &(&x - &z);
        let rp = (&x - &z).norm_l2() / x.norm_l2().max(z.norm_l2()).max(1e-300);
        let rd = rho * (&z - &z_old).norm_l2() / (rho * u.norm_l2()).max(1e-300);
        trace.push(scale * groups.sum_norms(&z));
        if rp <= cfg.tol && rd <= cfg.tol {
            converged = true;
            break;
        }
        if k % 10 == 0 {
            let f = if rp > 10.0 * rd {
                2.0
            } else if rd > 10.0 * rp {
                0.5
            } else {
                1.0
            };
            rho *= f;
            u = linalg::scale(u.as_ref(), 1.0 / f);
        }
    }
    let xs = linalg::scale(x.as_ref(), scale);
    let mut sol = RowSparseSolution::build(xs, trace, iters, converged, cfg.epsilon_floor);
    sol.lambda = Some(0.0);
    Ok(sol)
}

/// X = D Aᴴ (μI + A D Aᴴ)⁻¹ Y with D = diag(d).
fn weighted_ls(a: MatRef<'_, C64>, ah: &CMat, y: MatRef<'_, C64>, d: &[f64], mu: f64) -> CMat {
    let (m, n) = (a.nrows(), a.ncols());
    let ad = Mat::from_fn(m, n, |i, j| a[(i, j)] * d[j]);
    let mut g = &ad * ah;
    for i in 0..m {
        g[(i, i)] += C64::new(mu, 0.0);
    }
    let s = hpd_solve(g.as_ref(), y);
    let mut x = ah * &s;
    for i in 0..n {
        for j in 0..x.ncols() {
            x[(i, j)] *= d[i];
        }
    }
    x
}

fn smoothing_eps(y: MatRef<'_, C64>, n: usize) -> f64 {
    1e-12 * y.norm_l2().powi(2) / (n * y.ncols()) as f64
}

fn lq_penalty(x: &CMat, q: f64, eps: f64) -> f64 {
    row_norms2(x.as_ref())
        .into_iter()
        .map(|s| (s + eps).powf(0.5 * q))
        .sum()
}

fn inverse_weights(x: &CMat, q: f64, eps: f64) -> Vec<f64> {
    row_norms2(x.as_ref())
        .into_iter()
        .map(|s| (s + eps).powf(1.0 - 0.5 * q))
        .collect()
}

fn relative_change(prev: f64, cur: f64) -> f64 {
    (prev - cur).abs() / prev.abs().max(cur.abs()).max(1e-300)
}

/// Reweighted least squares for λ‖X‖_{2,q}^q + ½‖AX − Y‖²_F, or for
/// ‖X‖_{2,q}^q subject to AX = Y when λ = 0.
///
/// Row norms are smoothed as (‖X_n‖² + ε)^{1/2}; the trace records that smoothed objective.
pub fn m_focuss(
    y: MatRef<'_, C64>,
    a: MatRef<'_, C64>,
    q: f64,
    lambda: f64,
    cfg: &GridSolverConfig,
) -> Result<RowSparseSolution> {
    check_dims(y, a)?;
    cfg.validate()?;
    check_q(q)?;
    if !(lambda >= 0.0) {
        return Err(DoaError::Domain(format!("λ must be nonnegative, got {lambda}")));
    }
    let (n, l) = (a.ncols(), y.ncols());
    if y.norm_l2() == 0.0 {
        let mut sol = RowSparseSolution::build(linalg::zeros(n, l), vec![0.0], 0, true, cfg.epsilon_floor);
        sol.lambda = Some(lambda);
        return Ok(sol);
    }
    if lambda == 0.0 {
        let floor = range_distance(y, a);
        if floor > 1e-10 * y.norm_l2() {
            return Err(DoaError::Infeasible("data lie outside the dictionary range".into()));
        }
    }
    let eps = smoothing_eps(y, n);
    let ah = a.adjoint().to_owned();
    let mu = lambda * q;
    let objective = |x: &CMat| {
        if lambda == 0.0 {
            lq_penalty(x, q, eps)
        } else {
            lambda * lq_penalty(x, q, eps) + 0.5 * residual2(a, x, y)
        }
    };
    let mut x = weighted_ls(a, &ah, y, &vec![1.0; n], mu);
    let mut trace = vec![objective(&x)];
    let mut converged = false;
    let mut iters = 0;
    for k in 1..=cfg.max_iters {
        iters = k;
        let d = inverse_weights(&x, q, eps);
        x = weighted_ls(a, &ah, y, &d, mu);
        let f = objective(&x);
        let prev = *trace.last().unwrap();
        trace.push(f);
        if relative_change(prev, f) <= cfg.tol {
            converged = true;
            break;
        }
    }
    let mut sol = RowSparseSolution::build(x, trace, iters, converged, cfg.epsilon_floor);
    sol.lambda = Some(lambda);
    Ok(sol)
}

/// Single-snapshot FOCUSS on a vector, written without the matrix row machinery.
pub fn focuss(
    y: &[C64],
    a: MatRef<'_, C64>,
    q: f64,
    lambda: f64,
    cfg: &GridSolverConfig,
) -> Result<RowSparseSolution> {
    let ym = linalg::from_col(y);
    check_dims(ym.as_ref(), a)?;
    cfg.validate()?;
    check_q(q)?;
    if !(lambda >= 0.0) {
        return Err(DoaError::Domain(format!("λ must be nonnegative, got {lambda}")));
    }
    let (m, n) = (a.nrows(), a.ncols());
    let y2: f64 = y.iter().map(|v| v.norm_sqr()).sum();
    if y2 == 0.0 {
        let mut sol = RowSparseSolution::build(linalg::zeros(n, 1), vec![0.0], 0, true, cfg.epsilon_floor);
        sol.lambda = Some(lambda);
        return Ok(sol);
    }
    let eps = 1e-12 * y2 / n as f64;
    let mu = lambda * q;
    let step = |d: &[f64]| -> Vec<C64> {
        let g = Mat::from_fn(m, m, |i, j| {
            let mut s = ZERO;
            for k in 0..n {
                s += a[(i, k)] * a[(j, k)].conj() * d[k];
            }
            if i == j {
                s += C64::new(mu, 0.0);
            }
            s
        });
        let s = hpd_solve(g.as_ref(), ym.as_ref());
        (0..n)
            .map(|k| {
                let mut v = ZERO;
                for i in 0..m {
                    v += a[(i, k)].conj() * s[(i, 0)];
                }
                v * d[k]
            })
            .collect()
    };
    let objective = |x: &[C64]| {
        let pen: f64 = x.iter().map(|v| (v.norm_sqr() + eps).powf(0.5 * q)).sum();
        if lambda == 0.0 {
            pen
        } else {
            let mut r2 = 0.0;
            for i in 0..m {
                let mut s = -y[i];
                for k in 0..n {
                    s += a[(i, k)] * x[k];
                }
                r2 += s.norm_sqr();
            }
            lambda * pen + 0.5 * r2
        }
    };
    let mut x = step(&vec![1.0; n]);
    let mut trace = vec![objective(&x)];
    let mut converged = false;
    let mut iters = 0;
    for k in 1..=cfg.max_iters {
        iters = k;
        let d: Vec<f64> = x.iter().map(|v| (v.norm_sqr() + eps).powf(1.0 - 0.5 * q)).collect();
        x = step(&d);
        let f = objective(&x);
        let prev = *trace.last().unwrap();
        trace.push(f);
        if relative_change(prev, f) <= cfg.tol {
            converged = true;
            break;
        }
    }
    let mut sol = RowSparseSolution::build(linalg::from_col(&x), trace, iters, converged, cfg.epsilon_floor);
    sol.lambda = Some(lambda);
    Ok(sol)
}

/// SLIM: alternates the reweighted X update and η = ‖AX − Y‖²_F/(ML) on
/// ML log η + ‖AX − Y‖²_F/η + (2/q)‖X‖_{2,q}^q. Returns the solution and η̂.
pub fn slim(
    y: MatRef<'_, C64>,
    a: MatRef<'_, C64>,
    q: f64,
    cfg: &GridSolverConfig,
) -> Result<(RowSparseSolution, f64)> {
    check_dims(y, a)?;
    cfg.validate()?;
    check_q(q)?;
    let (m, n, l) = (a.nrows(), a.ncols(), y.ncols());
    let ml = (m * l) as f64;
    let y2 = y.norm_l2().powi(2);
    if y2 == 0.0 {
        let sol = RowSparseSolution::build(linalg::zeros(n, l), vec![], 0, true, cfg.epsilon_floor);
        return Ok((sol, 0.0));
    }
    let eps = smoothing_eps(y, n);
    let eta_floor = 1e-12 * y2 / ml;
    let ah = a.adjoint().to_owned();
    let objective =
        |x: &CMat, eta: f64| ml * eta.ln() + residual2(a, x, y) / eta + 2.0 / q * lq_penalty(x, q, eps);

    let col2: Vec<f64> = row_norms2(ah.as_ref());
    let b = &ah * y;
    let mut x = Mat::from_fn(n, l, |i, j| b[(i, j)] / col2[i].max(1e-300));
    let mut eta = (residual2(a, &x, y) / ml).max(eta_floor);
    let mut trace = vec![objective(&x, eta)];
    let mut converged = false;
    let mut iters = 0;
    for k in 1..=cfg.max_iters {
        iters = k;
        let d = inverse_weights(&x, q, eps);
        x = weighted_ls(a, &ah, y, &d, eta);
        eta = (residual2(a, &x, y) / ml).max(eta_floor);
        let f = objective(&x, eta);
        let prev = *trace.last().unwrap();
        trace.push(f);
        if relative_change(prev, f) <= cfg.tol {
            converged = true;
            break;
        }
    }
    Ok((
        RowSparseSolution::build(x, trace, iters, converged, cfg.epsilon_floor),
        eta,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpiceCriterion {
    /// ‖R^{-1/2}(R̃ − R)R̃^{-1/2}‖²_F, for nonsingular R̃.
    H1,
    /// ‖R^{-1/2}(R̃ − R)‖²_F.
    H2,
}

#[derive(Clone, Debug)]
pub struct SpiceResult {
    pub p: Vec<f64>,
    pub sigma: f64,
    /// Fitted covariance A diag(p) Aᴴ + σI.
    pub r_hat: CMat,
    pub criterion: SpiceCriterion,
    /// Criterion value without its additive constant, at each iterate.
    pub objective_trace: Vec<f64>,
    /// Additive constant: −2M for h1, −2 tr R̃ for h2.
    pub constant: f64,
    pub iterations: usize,
    pub converged: bool,
    pub note: Option<String>,
}

fn model_covariance(a: MatRef<'_, C64>, p: &[f64], sigma: f64) -> CMat {
    let (m, n) = (a.nrows(), a.ncols());
    let ap = Mat::from_fn(m, n, |i, j| a[(i, j)] * p[j]);
    let mut r = &ap * a.adjoint();
    for i in 0..m {
        r[(i, i)] += C64::new(sigma, 0.0);
    }
    linalg::hermitian_part(r.as_ref())
}

fn quad_forms(a: MatRef<'_, C64>, h: &CMat) -> Vec<f64> {
    let ha = h * a;
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| (a[(i, j)].conj() * ha[(i, j)]).re).sum())
        .collect()
}

/// SPICE without power renormalization. Uses h1 when L ≥ M and R̃ is
/// well conditioned, h2 otherwise.
pub fn spice(y: MatRef<'_, C64>, a: MatRef<'_, C64>, cfg: &GridSolverConfig) -> Result<SpiceResult> {
    check_dims(y, a)?;
    cfg.validate()?;
    let (m, n, l) = (a.nrows(), a.ncols(), y.ncols());
    let rt = sample_covariance(y);
    let trt = linalg::trace(rt.as_ref()).re;
    if trt == 0.0 {
        return Ok(SpiceResult {
            p: vec![0.0; n],
            sigma: 0.0,
            r_hat: linalg::zeros(m, m),
            criterion: if l >= m { SpiceCriterion::H1 } else { SpiceCriterion::H2 },
            objective_trace: vec![0.0],
            constant: 0.0,
            iterations: 0,
            converged: true,
            note: None,
        });
    }
    let eig = herm_eig(rt.as_ref());
    let lmax = eig.values[m - 1];
    let nonsingular = eig.values[0] > 1e-10 * lmax;
    let mut note = None;
    let criterion = if l >= m && nonsingular {
        SpiceCriterion::H1
    } else {
        if l >= m {
            note = Some("sample covariance is singular; switched to h2".into());
        }
        SpiceCriterion::H2
    };
    let (d, w, w_sigma, constant) = match criterion {
        SpiceCriterion::H1 => {
            let d = linalg::rebuild(&eig, |v| v.max(0.0).sqrt());
            let rinv = linalg::rebuild(&eig, |v| 1.0 / v);
            let w = quad_forms(a, &rinv);
            let ws = linalg::trace(rinv.as_ref()).re;
            (d, w, ws, -2.0 * m as f64)
        }
        SpiceCriterion::H2 => {
            let d = if l < m {
                let g = y.adjoint() * y;
                let s = linalg::psd_sqrt(g.as_ref());
                linalg::scale((y * &s).as_ref(), 1.0 / l as f64)
            } else {
                rt.clone()
            };
            let w = row_norms2(a.adjoint().to_owned().as_ref());
            (d, w, m as f64, -2.0 * trt)
        }
    };
    let ah = a.adjoint().to_owned();
    let bf = quad_forms(a, &rt);
    let col2 = row_norms2(ah.as_ref());
    let mut p: Vec<f64> = (0..n).map(|k| bf[k] / col2[k].powi(2).max(1e-300)).collect();
    let mut sigma = trt / m as f64;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iters = 0;
    for k in 1..=cfg.max_iters {
        iters = k;
        let r = model_covariance(a, &p, sigma);
        let qm = hpd_solve(r.as_ref(), d.as_ref());
        let fit = inner_re(d.as_ref(), qm.as_ref());
        let f = fit
            + p.iter().zip(&w).map(|(pi, wi)| pi * wi).sum::<f64>()
            + w_sigma * sigma;
        if let Some(&prev) = trace.last() {
            trace.push(f);
            if relative_change(prev, f) <= cfg.tol {
                converged = true;
                break;
            }
        } else {
            trace.push(f);
        }
        let aq = &ah * &qm;
        let rn = row_norms2(aq.as_ref());
        for i in 0..n {
            p[i] *= rn[i].sqrt() / w[i].sqrt();
        }
        sigma *= qm.norm_l2() / w_sigma.sqrt();
    }
    Ok(SpiceResult {
        r_hat: model_covariance(a, &p, sigma),
        p,
        sigma,
        criterion,
        objective_trace: trace,
        constant,
        iterations: iters,
        converged,
        note,
    })
}

#[derive(Clone, Debug)]
pub struct EmResult {
    pub p: Vec<f64>,
    pub sigma: f64,
    /// log det R + tr(R⁻¹R̃) at each iterate.
    pub objective_trace: Vec<f64>,
}

/// Negative log-likelihood per snapshot, up to a constant.
pub fn neg_log_likelihood(r: MatRef<'_, C64>, rt: MatRef<'_, C64>) -> f64 {
    let logdet: f64 = linalg::herm_eigenvalues(r).iter().map(|v| v.ln()).sum();
    logdet + linalg::trace(hpd_solve(r, rt).as_ref()).re
}

/// EM for the Gaussian model Y = AX + E with row powers p and noise power σ.
pub fn mle_em(y: MatRef<'_, C64>, a: MatRef<'_, C64>, iters: usize) -> Result<EmResult> {
    check_dims(y, a)?;
    if iters == 0 {
        return Err(DoaError::Config("at least one EM iteration required".into()));
    }
    let (m, n) = (a.nrows(), a.ncols());
    let rt = sample_covariance(y);
    let trt = linalg::trace(rt.as_ref()).re;
    if trt == 0.0 {
        return Ok(EmResult {
            p: vec![0.0; n],
            sigma: 0.0,
            objective_trace: vec![],
        });
    }
    let sigma_floor = 1e-12 * trt / m as f64;
    let ah = a.adjoint().to_owned();
    let col2 = row_norms2(ah.as_ref());
    let bf = quad_forms(a, &rt);
    let mut p: Vec<f64> = (0..n).map(|k| bf[k] / col2[k].powi(2).max(1e-300)).collect();
    let mut sigma = 0.1 * trt / m as f64;
    let mut trace = Vec::with_capacity(iters + 1);
    for it in 0..=iters {
        let r = model_covariance(a, &p, sigma);
        let k = linalg::hpd_inverse(r.as_ref());
        let krk = &(&k * &rt) * &k;
        trace.push(neg_log_likelihood(r.as_ref(), rt.as_ref()));
        if it == iters {
            break;
        }
        let s = model_covariance(a, &p, 0.0);
        let ks = &k * &s;
        let tr_s = linalg::trace(s.as_ref()).re;
        let tr_sks = inner_re(s.as_ref(), ks.as_ref());
        let qk = quad_forms(a, &k);
        let qkrk = quad_forms(a, &krk);
        let fit = sigma * sigma * linalg::trace(krk.as_ref()).re;
        for i in 0..n {
            let post_var = p[i] - p[i] * p[i] * qk[i];
            p[i] = (p[i] * p[i] * qkrk[i] + post_var).max(0.0);
        }
        sigma = ((fit + tr_s - tr_sks) / m as f64).max(sigma_floor);
    }
    Ok(EmResult {
        p,
        sigma,
        objective_trace: trace,
    })
}

#[derive(Clone, Debug)]
pub struct ReducedSnapshots {
    /// M×r with Y_DR Y_DRᴴ = Y Yᴴ.
    pub y: CMat,
    pub rank: usize,
    /// Dominant eigenvectors of Y Yᴴ (M×r).
    pub basis: CMat,
    /// Singular values of Y, descending (r entries).
    pub singular_values: Vec<f64>,
}

impl ReducedSnapshots {
    /// Maps a reduced solution back to the full snapshot count: X = X_DR Σ_r⁻¹ U_rᴴ Y.
    pub fn lift(&self, x_dr: MatRef<'_, C64>, y: MatRef<'_, C64>) -> CMat {
        let r = self.rank;
        let xs = Mat::from_fn(x_dr.nrows(), r, |i, j| x_dr[(i, j)] / self.singular_values[j]);
        &(&xs * self.basis.adjoint()) * y
    }
}

/// Reduces L snapshots to r = rank(Y) via the eigendecomposition of Y Yᴴ.
pub fn reduce_snapshots(y: MatRef<'_, C64>) -> ReducedSnapshots {
    let m = y.nrows();
    let g = y * y.adjoint();
    let e = herm_eig(g.as_ref());
    let lmax = e.values.last().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..m)
        .rev()
        .filter(|&k| e.values[k] > 1e-12 * lmax && e.values[k] > 0.0)
        .collect();
    let r = keep.len();
    let sv: Vec<f64> = keep.iter().map(|&k| e.values[k].sqrt()).collect();
    let basis = Mat::from_fn(m, r, |i, j| e.vectors[(i, keep[j])]);
    let yd = Mat::from_fn(m, r, |i, j| basis[(i, j)] * sv[j]);
    ReducedSnapshots {
        y: yd,
        rank: r,
        basis,
        singular_values: sv,
    }
}

/// ℓ2,1-SVD reduction Y V D_Kᵀ = U_K Σ_K.
pub fn l21_svd_reduce(y: MatRef<'_, C64>, k: usize) -> Result<CMat> {
    let kmax = y.nrows().min(y.ncols());
    if k == 0 || k > kmax {
        return Err(DoaError::Domain(format!("K must lie in 1..={kmax}, got {k}")));
    }
    let d = linalg::thin_svd(y);
    Ok(Mat::from_fn(y.nrows(), k, |i, j| d.u[(i, j)] * d.s[j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array_model::{steering_matrix, uniform_grid};
    use crate::linalg::{cx, eye};
    use crate::signal_sim::cn_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn nondecreasing_violation(t: &[f64]) -> f64 {
        t.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn lasso_large_lambda_is_zero() {
        let mut r = rng(1);
        let a = cn_matrix(&mut r, 6, 12, 1.0);
        let y = cn_matrix(&mut r, 6, 3, 1.0);
        let b = a.adjoint() * &y;
        let lmax = row_norms2(b.as_ref()).into_iter().fold(0.0, f64::max).sqrt();
        let sol = l21_lasso(y.as_ref(), a.as_ref(), lmax * 1.0001, &Default::default()).unwrap();
        assert_eq!(sol.x.norm_l2(), 0.0);
        assert!(sol.support.is_empty());
    }

    #[test]
    fn lasso_identity_soft_thresholds() {
        let y = linalg::from_col(&[cx(3.0, 4.0), cx(0.3, 0.0), cx(0.0, -2.0)]);
        let sol = l21_lasso(y.as_ref(), eye(3).as_ref(), 1.0, &GridSolverConfig::with_tol(1e-12)).unwrap();
        let want = [cx(3.0, 4.0) * 0.8, ZERO, cx(0.0, -1.0)];
        for i in 0..3 {
            assert!((sol.x[(i, 0)] - want[i]).norm() < 1e-10);
        }
        assert_eq!(sol.support, vec![0, 2]);
    }

    fn l20_support(a: &CMat, y: &CMat, k: usize) -> Vec<usize> {
        let n = a.ncols();
        let mut best = (f64::INFINITY, vec![]);
        for i in 0..n {
            for j in i + 1..n {
                let sub = Mat::from_fn(a.nrows(), k, |r, c| a[(r, [i, j][c])]);
                let x = &linalg::pinv(sub.as_ref(), 1e-12) * y;
                let res = residual2(sub.as_ref(), &x, y.as_ref());
                if res < best.0 {
                    best = (res, vec![i, j]);
                }
            }
        }
        best.1
    }

    #[test]
    fn lasso_support_contains_bruteforce_l20() {
        let mut r = rng(7);
        for _ in 0..5 {
            let a = cn_matrix(&mut r, 6, 12, 1.0);
            let xs = cn_matrix(&mut r, 2, 2, 1.0);
            let rows = [2usize, 9];
            let asub = Mat::from_fn(6, 2, |i, j| a[(i, rows[j])]);
            let y = &asub * &xs;
            let truth = l20_support(&a, &y, 2);
            assert_eq!(truth, rows.to_vec());
            let sol = l21_lasso(y.as_ref(), a.as_ref(), 1e-3, &GridSolverConfig::with_tol(1e-8)).unwrap();
            assert!(sol.converged);
            for t in &truth {
                assert!(sol.support.contains(t));
            }
        }
    }

    #[test]
    fn lasso_kkt_holds_on_convergence() {
        let mut r = rng(3);
        let a = steering_matrix(&(0..8).collect::<Vec<_>>(), &uniform_grid(32));
        let y = cn_matrix(&mut r, 8, 4, 1.0);
        let sol = l21_lasso(y.as_ref(), a.as_ref(), 2.0, &GridSolverConfig::with_tol(1e-8)).unwrap();
        assert!(sol.converged);
        assert!(sol.kkt_residual.unwrap() <= 1e-8);
    }

    #[test]
    fn bpdn_large_eta_is_zero() {
        let mut r = rng(2);
        let a = cn_matrix(&mut r, 5, 10, 1.0);
        let y = cn_matrix(&mut r, 5, 2, 1.0);
        let sol = l21_bpdn(y.as_ref(), a.as_ref(), y.norm_l2(), &Default::default()).unwrap();
        assert_eq!(sol.x.norm_l2(), 0.0);
    }

    #[test]
    fn bpdn_exact_single_atom() {
        let a = steering_matrix(&(0..8).collect::<Vec<_>>(), &uniform_grid(32));
        let s = cx(0.7, -1.1);
        let y = Mat::from_fn(8, 1, |i, _| a[(i, 5)] * s);
        let cfg = GridSolverConfig {
            max_iters: 50_000,
            tol: 1e-10,
            ..Default::default()
        };
        let sol = l21_bpdn(y.as_ref(), a.as_ref(), 0.0, &cfg).unwrap();
        for n in 0..32 {
            let want = if n == 5 { s } else { ZERO };
            assert!((sol.x[(n, 0)] - want).norm() < 1e-6, "row {n}");
        }
    }

    #[test]
    fn bpdn_infeasible_exact_constraint() {
        let a = Mat::from_fn(3, 2, |i, j| if i == j { cx(1.0, 0.0) } else { ZERO });
        let y = linalg::from_col(&[cx(1.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)]);
        let err = l21_bpdn(y.as_ref(), a.as_ref(), 0.0, &Default::default());
        assert!(matches!(err, Err(DoaError::Infeasible(_))));
    }

    #[test]
    fn bpdn_matches_lasso_at_same_residual() {
        let mut r = rng(11);
        let a = cn_matrix(&mut r, 6, 15, 1.0);
        let y = cn_matrix(&mut r, 6, 2, 1.0);
        let cfg = GridSolverConfig::with_tol(1e-9);
        let eta = 0.3 * y.norm_l2();
        let b = l21_bpdn(y.as_ref(), a.as_ref(), eta, &cfg).unwrap();
        let res = residual2(a.as_ref(), &b.x, y.as_ref()).sqrt();
        assert!(res <= eta * (1.0 + 1e-9));
        let l = l21_lasso(y.as_ref(), a.as_ref(), b.lambda.unwrap(), &cfg).unwrap();
        let nb = Groups::Rows.sum_norms(&b.x);
        let nl = Groups::Rows.sum_norms(&l.x);
        assert!((nb - nl).abs() / nl < 1e-6);
    }

    #[test]
    fn focuss_identity_returns_data() {
        let mut r = rng(4);
        let y = cn_matrix(&mut r, 4, 3, 1.0);
        let sol = m_focuss(y.as_ref(), eye(4).as_ref(), 1.0, 0.0, &Default::default()).unwrap();
        assert!(linalg::rel_diff(sol.x.as_ref(), y.as_ref()) < 1e-12);
    }

    #[test]
    fn single_snapshot_paths_agree() {
        let mut r = rng(5);
        let a = cn_matrix(&mut r, 5, 14, 1.0);
        let y = cn_matrix(&mut r, 5, 1, 1.0);
        let cfg = GridSolverConfig {
            max_iters: 40,
            tol: 1e-300,
            ..Default::default()
        };
        for &(q, lam) in &[(0.5, 0.0), (1.0, 0.1), (0.8, 0.02)] {
            let mm = m_focuss(y.as_ref(), a.as_ref(), q, lam, &cfg).unwrap();
            let ss = focuss(&linalg::col_vec(y.as_ref(), 0), a.as_ref(), q, lam, &cfg).unwrap();
            assert_eq!(mm.objective_trace.len(), ss.objective_trace.len());
            for (u, v) in mm.objective_trace.iter().zip(&ss.objective_trace) {
                assert!((u - v).abs() <= 1e-9 * u.abs().max(1.0));
            }
            assert!(linalg::rel_diff(mm.x.as_ref(), ss.x.as_ref()) < 1e-8);
        }
    }

    #[test]
    fn m_focuss_finds_l20_support() {
        let mut r = rng(8);
        let mut hits = 0;
        for _ in 0..100 {
            let a = cn_matrix(&mut r, 6, 12, 1.0);
            let xs = cn_matrix(&mut r, 2, 3, 1.0);
            let mut rows: Vec<usize> = rand::seq::index::sample(&mut r, 12, 2).into_vec();
            rows.sort();
            let asub = Mat::from_fn(6, 2, |i, j| a[(i, rows[j])]);
            let y = &asub * &xs;
            let truth = l20_support(&a, &y, 2);
            let cfg = GridSolverConfig {
                max_iters: 500,
                tol: 1e-10,
                epsilon_floor: 1e-6,
            };
            let sol = m_focuss(y.as_ref(), a.as_ref(), 0.5, 0.0, &cfg).unwrap();
            if sol.support == truth {
                hits += 1;
            }
        }
        assert!(hits >= 90, "{hits}/100");
    }

    #[test]
    fn reweighted_traces_nonincreasing() {
        let mut r = rng(9);
        let a = steering_matrix(&(0..6).collect::<Vec<_>>(), &uniform_grid(24));
        for t in 0..10 {
            let y = cn_matrix(&mut r, 6, 1 + t % 3, 1.0);
            let cfg = GridSolverConfig {
                max_iters: 200,
                tol: 1e-12,
                ..Default::default()
            };
            let f = m_focuss(y.as_ref(), a.as_ref(), 0.7, 0.05, &cfg).unwrap();
            assert!(nondecreasing_violation(&f.objective_trace) <= 1e-10);
            let (s, _) = slim(y.as_ref(), a.as_ref(), 1.0, &cfg).unwrap();
            let scale = s.objective_trace[0].abs().max(1.0);
            assert!(nondecreasing_violation(&s.objective_trace) <= 1e-10 * scale);
            let sp = spice(y.as_ref(), a.as_ref(), &cfg).unwrap();
            assert!(nondecreasing_violation(&sp.objective_trace) <= 1e-10 * sp.objective_trace[0]);
            let em = mle_em(y.as_ref(), a.as_ref(), 50).unwrap();
            let scale = em.objective_trace[0].abs().max(1.0);
            assert!(nondecreasing_violation(&em.objective_trace) <= 1e-10 * scale);
        }
    }

    #[test]
    fn zero_data_gives_zero() {
        let a = steering_matrix(&(0..4).collect::<Vec<_>>(), &uniform_grid(16));
        let y = linalg::zeros(4, 2);
        let cfg = GridSolverConfig::default();
        let (s, eta) = slim(y.as_ref(), a.as_ref(), 1.0, &cfg).unwrap();
        assert_eq!(s.x.norm_l2(), 0.0);
        assert_eq!(eta, 0.0);
        let sp = spice(y.as_ref(), a.as_ref(), &cfg).unwrap();
        assert!(sp.p.iter().all(|&p| p == 0.0) && sp.sigma == 0.0);
        let em = mle_em(y.as_ref(), a.as_ref(), 5).unwrap();
        assert!(em.p.iter().all(|&p| p == 0.0) && em.sigma == 0.0);
    }

    fn argmax(v: &[f64]) -> usize {
        (0..v.len()).max_by(|&i, &j| v[i].partial_cmp(&v[j]).unwrap()).unwrap()
    }

    #[test]
    fn single_source_concentrates() {
        let mut r = rng(12);
        let m = 8;
        let a = steering_matrix(&(0..m).collect::<Vec<_>>(), &uniform_grid(64));
        let s = cn_matrix(&mut r, 1, 20, 1.0);
        let noise = cn_matrix(&mut r, m, 20, 1e-6);
        let y = Mat::from_fn(m, 20, |i, j| a[(i, 17)] * s[(0, j)] + noise[(i, j)]);
        let y0 = Mat::from_fn(m, 20, |i, j| a[(i, 17)] * s[(0, j)]);
        let cfg = GridSolverConfig {
            max_iters: 5000,
            tol: 1e-10,
            ..Default::default()
        };
        let sp = spice(y.as_ref(), a.as_ref(), &cfg).unwrap();
        assert_eq!(sp.criterion, SpiceCriterion::H1);
        let total: f64 = sp.p.iter().sum();
        assert!(sp.p[17] / total > 0.99);
        let sp0 = spice(y0.as_ref(), a.as_ref(), &cfg).unwrap();
        assert_eq!(sp0.criterion, SpiceCriterion::H2);
        assert!(sp0.note.is_some());
        let total: f64 = sp0.p.iter().sum();
        assert!(sp0.p[17] / total > 0.99);

        let mf = a.adjoint() * &y;
        let mf_peak = argmax(&row_norms2(mf.as_ref()));
        let strict = GridSolverConfig {
            epsilon_floor: 1e-3,
            ..cfg
        };
        let (sl, _) = slim(y.as_ref(), a.as_ref(), 1.0, &strict).unwrap();
        assert_eq!(sl.support, vec![mf_peak]);
        let em = mle_em(y.as_ref(), a.as_ref(), 200).unwrap();
        assert_eq!(argmax(&em.p), mf_peak);
    }

    #[test]
    fn spice_scales_quadratically() {
        let mut r = rng(13);
        let a = steering_matrix(&(0..5).collect::<Vec<_>>(), &uniform_grid(20));
        for &l in &[2usize, 12] {
            let y = cn_matrix(&mut r, 5, l, 1.0);
            let y3 = linalg::scale(y.as_ref(), 3.0);
            let cfg = GridSolverConfig {
                max_iters: 300,
                tol: 1e-300,
                ..Default::default()
            };
            let s1 = spice(y.as_ref(), a.as_ref(), &cfg).unwrap();
            let s3 = spice(y3.as_ref(), a.as_ref(), &cfg).unwrap();
            assert_eq!(argmax(&s1.p), argmax(&s3.p));
            for (p1, p3) in s1.p.iter().zip(&s3.p) {
                assert!((9.0 * p1 - p3).abs() <= 1e-6 * s3.p.iter().cloned().fold(0.0, f64::max));
            }
            assert!((9.0 * s1.sigma - s3.sigma).abs() <= 1e-6 * s3.sigma);
        }
    }

    #[test]
    fn reduce_snapshots_gram_property() {
        let mut r = rng(14);
        for &(m, l) in &[(4usize, 1usize), (5, 3), (4, 9)] {
            let y = cn_matrix(&mut r, m, l, 1.0);
            let red = reduce_snapshots(y.as_ref());
            assert_eq!(red.rank, m.min(l));
            let g = &y * y.adjoint();
            let gd = &red.y * red.y.adjoint();
            assert!(linalg::rel_diff(gd.as_ref(), g.as_ref()) < 1e-10);
            if l == 1 {
                let ph = red.y[(0, 0)] / y[(0, 0)];
                assert!((ph.norm() - 1.0).abs() < 1e-10);
                for i in 0..m {
                    assert!((red.y[(i, 0)] - y[(i, 0)] * ph).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn reduced_lasso_matches_full() {
        let mut r = rng(15);
        let a = steering_matrix(&(0..6).collect::<Vec<_>>(), &uniform_grid(24));
        let y = cn_matrix(&mut r, 6, 20, 1.0);
        let red = reduce_snapshots(y.as_ref());
        let cfg = GridSolverConfig::with_tol(1e-11);
        let full = l21_lasso(y.as_ref(), a.as_ref(), 4.0, &cfg).unwrap();
        let dr = l21_lasso(red.y.as_ref(), a.as_ref(), 4.0, &cfg).unwrap();
        let pf: Vec<f64> = row_norms2(full.x.as_ref());
        let pd: Vec<f64> = row_norms2(dr.x.as_ref());
        let pmax = pf.iter().cloned().fold(0.0, f64::max);
        for (u, v) in pf.iter().zip(&pd) {
            assert!((u - v).abs() <= 1e-6 * pmax);
        }
        let lifted = red.lift(dr.x.as_ref(), y.as_ref());
        assert!(linalg::rel_diff(lifted.as_ref(), full.x.as_ref()) < 1e-5);
    }

    #[test]
    fn svd_reduce_properties() {
        let mut r = rng(16);
        let a = steering_matrix(&(0..6).collect::<Vec<_>>(), &[0.1, 0.35]);
        let s = cn_matrix(&mut r, 2, 10, 1.0);
        let y = &a * &s;
        let ysv = l21_svd_reduce(y.as_ref(), 2).unwrap();
        let g = &y * y.adjoint();
        let gs = &ysv * ysv.adjoint();
        assert!((&gs - &g).norm_l2() < 1e-10 * g.norm_l2());
        let s1 = linalg::singular_values(y.as_ref())[0];
        let y1 = l21_svd_reduce(y.as_ref(), 1).unwrap();
        assert!((y1.norm_l2().powi(2) - s1 * s1).abs() < 1e-9 * s1 * s1);
        let yf = cn_matrix(&mut r, 6, 3, 1.0);
        let ys = l21_svd_reduce(yf.as_ref(), 3).unwrap();
        let proj = &ys * &linalg::pinv(ys.as_ref(), 1e-12);
        assert!(linalg::rel_diff((&proj * &yf).as_ref(), yf.as_ref()) < 1e-10);
        assert!(l21_svd_reduce(yf.as_ref(), 4).is_err());
        assert!(l21_svd_reduce(yf.as_ref(), 0).is_err());
    }
}
