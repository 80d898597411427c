//! Uniform front end over every estimator: one name, one parameter bag, one report schema.

use crate::array_model::{uniform_grid, ArrayGeometry, SteeringDictionary};
use crate::error::{DoaError, Result};
use crate::gridless::{self, AnmMode, RamConfig};
use crate::linalg::{self, CMat, C64};
use crate::offgrid::{self, OffgridConfig, TaylorDictionary};
use crate::sdp_admm::{AdmmConfig, SdpSolution};
use crate::signal_sim::{coarray_average, sample_covariance, toeplitz};
use crate::sparse_ongrid::{self as og, GridSolverConfig, RowSparseSolution};
use crate::spectrum::{self, LineSpectrum, MusicOptions};
use faer::MatRef;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Anm,
    Gls,
    Ram,
    Emac,
    AnmCov,
    NnmMusic,
    Music,
    Esprit,
    L21Lasso,
    L21Bpdn,
    L21Svd,
    MFocuss,
    Slim,
    Spice,
    MleEm,
    OffgridAlt,
    OffgridJoint,
}

impl Method {
    pub const ALL: [Method; 17] = [
        Method::Anm,
        Method::Gls,
        Method::Ram,
        Method::Emac,
        Method::AnmCov,
        Method::NnmMusic,
        Method::Music,
        Method::Esprit,
        Method::L21Lasso,
        Method::L21Bpdn,
        Method::L21Svd,
        Method::MFocuss,
        Method::Slim,
        Method::Spice,
        Method::MleEm,
        Method::OffgridAlt,
        Method::OffgridJoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Anm => "anm",
            Method::Gls => "gls",
            Method::Ram => "ram",
            Method::Emac => "emac",
            Method::AnmCov => "anm-cov",
            Method::NnmMusic => "nnm-music",
            Method::Music => "music",
            Method::Esprit => "esprit",
            Method::L21Lasso => "l21-lasso",
            Method::L21Bpdn => "l21-bpdn",
            Method::L21Svd => "l21-svd",
            Method::MFocuss => "m-focuss",
            Method::Slim => "slim",
            Method::Spice => "spice",
            Method::MleEm => "mle-em",
            Method::OffgridAlt => "offgrid-alt",
            Method::OffgridJoint => "offgrid-joint",
        }
    }

    /// Methods that need the full coarray (a ULA, or an SLA whose differences cover 0..N−1).
    fn needs_coarray(self) -> bool {
        matches!(
            self,
            Method::AnmCov | Method::NnmMusic | Method::Music | Method::Esprit
        )
    }

    pub fn supports(self, geom: &ArrayGeometry) -> bool {
        match geom {
            ArrayGeometry::Planar { .. } => false,
            ArrayGeometry::Ula { .. } => true,
            ArrayGeometry::Sla { .. } => !self.needs_coarray() || coarray_complete(geom),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = DoaError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Method::ALL.iter().map(|m| m.name()).collect();
                DoaError::Config(format!("unknown method '{s}'; expected one of {}", names.join(", ")))
            })
    }
}

fn coarray_complete(geom: &ArrayGeometry) -> bool {
    let Ok(pos) = geom.positions() else {
        return false;
    };
    let n = geom.n();
    let mut seen = vec![false; n];
    for &a in &pos {
        for &b in &pos {
            if a >= b {
                seen[a - b] = true;
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// Human-readable list of the valid (method, geometry) pairings.
pub fn supported_pairs() -> String {
    let all: Vec<_> = Method::ALL.iter().map(|m| m.name()).collect();
    let cov: Vec<_> = Method::ALL
        .iter()
        .filter(|m| m.needs_coarray())
        .map(|m| m.name())
        .collect();
    format!(
        "ula: {}; sla: all except {} unless the difference coarray is complete; planar: none",
        all.join(", "),
        cov.join(", ")
    )
}

/// Optional knobs shared by every method; each method reads the ones it understands.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MethodParams {
    pub order: Option<usize>,
    pub auto_order: bool,
    pub eta: Option<f64>,
    pub lambda: Option<f64>,
    pub q: Option<f64>,
    /// Known noise variance; drives the default λ/η when they are not given.
    pub noise_variance: Option<f64>,
    pub grid_size: Option<usize>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub pencil: Option<usize>,
    pub ram_iters: Option<usize>,
    pub em_iters: Option<usize>,
}

/// Uniform output schema; fields a method does not produce are null.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EstimateReport {
    pub method: String,
    pub freqs: Vec<f64>,
    pub powers: Vec<f64>,
    pub sigma: Option<f64>,
    pub order: Option<usize>,
    pub order_confident: Option<bool>,
    pub converged: bool,
    pub iterations: usize,
    pub primal_residual: Option<f64>,
    pub dual_residual: Option<f64>,
    pub objective: Option<f64>,
    pub objective_trace: Option<Vec<f64>>,
    pub grid: Option<Vec<f64>>,
    pub row_powers: Option<Vec<f64>>,
    pub support: Option<Vec<usize>>,
    pub beta: Option<Vec<f64>>,
    pub refined_freqs: Option<Vec<f64>>,
    pub notes: Vec<String>,
}

impl EstimateReport {
    fn new(method: Method, spectrum: LineSpectrum) -> Self {
        let s = spectrum.sorted();
        EstimateReport {
            method: method.name().into(),
            freqs: s.freqs,
            powers: s.powers,
            sigma: s.sigma,
            order: None,
            order_confident: None,
            converged: true,
            iterations: 0,
            primal_residual: None,
            dual_residual: None,
            objective: None,
            objective_trace: None,
            grid: None,
            row_powers: None,
            support: None,
            beta: None,
            refined_freqs: None,
            notes: Vec::new(),
        }
    }

    pub fn spectrum(&self) -> LineSpectrum {
        LineSpectrum {
            freqs: self.freqs.clone(),
            powers: self.powers.clone(),
            sigma: self.sigma,
        }
    }

    fn with_sdp(mut self, sol: &SdpSolution) -> Self {
        self.converged = sol.converged;
        self.iterations = sol.iterations;
        self.primal_residual = Some(sol.primal_residual);
        self.dual_residual = Some(sol.dual_residual);
        self.objective = Some(sol.objective);
        self
    }

    fn with_rows(mut self, sol: &RowSparseSolution, grid: &[f64]) -> Self {
        self.converged = sol.converged;
        self.iterations = sol.iterations;
        self.objective = sol.objective_trace.last().copied();
        self.objective_trace = Some(sol.objective_trace.clone());
        self.grid = Some(grid.to_vec());
        self.row_powers = Some(sol.row_powers.clone());
        self.support = Some(sol.support.clone());
        self
    }
}

/// Local maxima of a power profile on a circular grid, strongest first; with `k`, only
/// the k strongest. Entries at or below `floor`·max are ignored.
pub fn grid_peaks(powers: &[f64], k: Option<usize>, floor: f64) -> Vec<usize> {
    let n = powers.len();
    let pmax = powers.iter().cloned().fold(0.0, f64::max);
    if n == 0 || pmax <= 0.0 {
        return Vec::new();
    }
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&i| {
            let p = powers[i];
            let l = powers[(i + n - 1) % n];
            let r = powers[(i + 1) % n];
            p > floor * pmax && p >= l && p > r
        })
        .collect();
    peaks.sort_by(|&a, &b| powers[b].total_cmp(&powers[a]).then(a.cmp(&b)));
    if let Some(k) = k {
        peaks.truncate(k);
    }
    peaks
}

fn grid_spectrum(grid: &[f64], powers: &[f64], k: Option<usize>, floor: f64) -> LineSpectrum {
    let idx = grid_peaks(powers, k, floor);
    LineSpectrum {
        freqs: idx.iter().map(|&i| grid[i]).collect(),
        powers: idx.iter().map(|&i| powers[i]).collect(),
        sigma: None,
    }
}

fn admm_config(p: &MethodParams) -> AdmmConfig {
    let mut cfg = AdmmConfig::default();
    if let Some(t) = p.tol {
        cfg.tol_primal = t;
        cfg.tol_dual = t;
    }
    if let Some(it) = p.max_iters {
        cfg.max_iters = it;
    }
    cfg
}

fn grid_config(p: &MethodParams) -> GridSolverConfig {
    let mut cfg = GridSolverConfig::default();
    if let Some(t) = p.tol {
        cfg.tol = t;
    }
    if let Some(it) = p.max_iters {
        cfg.max_iters = it;
    }
    cfg
}

fn positive(name: &str, v: Option<f64>) -> Result<Option<f64>> {
    match v {
        Some(x) if !(x >= 0.0) || !x.is_finite() => {
            Err(DoaError::Config(format!("{name} must be a finite value >= 0, got {x}")))
        }
        _ => Ok(v),
    }
}

/// Ball radius √(σ·M·L) used when only the noise variance is known.
pub fn default_ball_eta(m: usize, l: usize, sigma: f64) -> f64 {
    (sigma * (m * l) as f64).sqrt()
}

fn anm_mode(p: &MethodParams, m: usize, n: usize, l: usize) -> Result<AnmMode> {
    Ok(match (p.eta, p.lambda, p.noise_variance) {
        (Some(_), Some(_), _) => {
            return Err(DoaError::Config("give either eta or lambda, not both".into()))
        }
        (Some(eta), None, _) => AnmMode::Ball(eta),
        (None, Some(lam), _) => AnmMode::Regularized(lam),
        (None, None, Some(s)) if s > 0.0 => AnmMode::Regularized(gridless::default_lambda(m, n, l, s)?),
        _ => AnmMode::Exact,
    })
}

fn ball_eta(p: &MethodParams, m: usize, l: usize) -> f64 {
    p.eta
        .unwrap_or_else(|| default_ball_eta(m, l, p.noise_variance.unwrap_or(0.0)))
}

fn require_order(method: Method, p: &MethodParams) -> Result<()> {
    if p.order.is_none() && !p.auto_order {
        return Err(DoaError::Config(format!(
            "{method} needs a model order: pass --order K or --auto-order"
        )));
    }
    Ok(())
}

/// Covariance handed to the subspace methods: R̃ itself on a ULA, the coarray Toeplitz
/// matrix on an SLA.
fn subspace_covariance(y: MatRef<'_, C64>, geom: &ArrayGeometry) -> Result<CMat> {
    let r = sample_covariance(y);
    if geom.is_full() {
        Ok(r)
    } else {
        Ok(toeplitz(&coarray_average(r.as_ref(), geom)?))
    }
}

fn pick_order(p: &MethodParams, t: MatRef<'_, C64>) -> Result<(usize, Option<bool>)> {
    if let Some(k) = p.order {
        return Ok((k, None));
    }
    let mut eigs = linalg::herm_eigenvalues(t);
    eigs.reverse();
    for e in eigs.iter_mut() {
        *e = e.max(0.0);
    }
    let mo = spectrum::model_order(&eigs)?;
    Ok((mo.k, Some(mo.confident)))
}

fn dictionary(geom: &ArrayGeometry, p: &MethodParams, default_bar: usize) -> Result<SteeringDictionary> {
    let n_bar = p.grid_size.unwrap_or(default_bar);
    if n_bar < 2 {
        return Err(DoaError::Config("grid_size must be at least 2".into()));
    }
    SteeringDictionary::new(geom, uniform_grid(n_bar))
}

/// Runs `method` on snapshots `y` (M×L) from array `geom`.
pub fn estimate(
    method: Method,
    y: MatRef<'_, C64>,
    geom: &ArrayGeometry,
    p: &MethodParams,
) -> Result<EstimateReport> {
    geom.validate()?;
    if !method.supports(geom) {
        return Err(DoaError::UnsupportedGeometry(format!(
            "{method} does not support this geometry; valid pairs: {}",
            supported_pairs()
        )));
    }
    positive("eta", p.eta)?;
    positive("lambda", p.lambda)?;
    positive("noise_variance", p.noise_variance)?;
    if y.nrows() != geom.m() {
        return Err(DoaError::Dimension(format!(
            "data has {} rows, array has {} sensors",
            y.nrows(),
            geom.m()
        )));
    }
    if y.ncols() == 0 {
        return Err(DoaError::Dimension("data needs at least one snapshot".into()));
    }
    let (m, n, l) = (geom.m(), geom.n(), y.ncols());
    let order = p.order;
    let rep = match method {
        Method::Anm => {
            let res = gridless::anm(y, geom, anm_mode(p, m, n, l)?, &admm_config(p))?;
            let spec = if let Some(k) = order { res.spectrum.strongest(k) } else { res.spectrum };
            EstimateReport::new(method, spec).with_sdp(&res.solution)
        }
        Method::Gls => {
            let res = gridless::gls(y, geom, &admm_config(p))?;
            let spec = if let Some(k) = order { res.spectrum.strongest(k) } else { res.spectrum };
            let mut rep = EstimateReport::new(method, spec).with_sdp(&res.solution);
            if let Some(mo) = res.order {
                rep.order = Some(mo.k);
                rep.order_confident = Some(mo.confident);
            }
            rep
        }
        Method::Ram => {
            let mode = match p.eta {
                Some(eta) => AnmMode::Ball(eta),
                None if p.noise_variance.unwrap_or(0.0) > 0.0 => AnmMode::Ball(ball_eta(p, m, l)),
                None => AnmMode::Exact,
            };
            let ram_cfg = RamConfig {
                outer_iters: p.ram_iters.unwrap_or(RamConfig::default().outer_iters),
                ..RamConfig::default()
            };
            let res = gridless::ram(y, geom, mode, &ram_cfg, &admm_config(p))?;
            let spec = if let Some(k) = order { res.spectrum.strongest(k) } else { res.spectrum };
            let mut rep = EstimateReport::new(method, spec).with_sdp(&res.solution);
            rep.objective_trace = Some(res.trace.iter().map(|s| s.value()).collect());
            rep.notes.extend(
                res.trace
                    .iter()
                    .filter(|s| !s.accepted)
                    .map(|s| format!("step {} rejected", s.iter)),
            );
            rep
        }
        Method::Emac => {
            let res = gridless::emac(y, geom, p.pencil, anm_mode(p, m, n, l)?, order, &admm_config(p))?;
            EstimateReport::new(method, res.spectrum).with_sdp(&res.solution)
        }
        Method::AnmCov => {
            let sigma = p.noise_variance.ok_or_else(|| {
                DoaError::Config("anm-cov needs noise_variance (σ is subtracted from R̃)".into())
            })?;
            let eta = p.eta.unwrap_or_else(|| gridless::default_cov_eta(n, l, sigma));
            let r = sample_covariance(y);
            let res = gridless::anm_smv_cov(r.as_ref(), geom, sigma, eta, &admm_config(p))?;
            let mut spec = if let Some(k) = order { res.spectrum.strongest(k) } else { res.spectrum };
            spec.sigma = Some(sigma);
            EstimateReport::new(method, spec).with_sdp(&res.solution)
        }
        Method::NnmMusic => {
            require_order(method, p)?;
            let sigma = p.noise_variance.unwrap_or(0.0);
            let eta = p.eta.unwrap_or_else(|| gridless::default_cov_eta(n, l, sigma));
            let r = sample_covariance(y);
            let t = toeplitz(&coarray_average(r.as_ref(), geom)?);
            let (k, conf) = pick_order(p, gridless::nnm_denoise(t.as_ref(), eta)?.as_ref())?;
            let spec = gridless::nnm_music(r.as_ref(), geom, eta, k)?;
            let mut rep = EstimateReport::new(method, spec);
            rep.order = Some(k);
            rep.order_confident = conf;
            rep
        }
        Method::Music | Method::Esprit => {
            require_order(method, p)?;
            let t = subspace_covariance(y, geom)?;
            let (k, conf) = pick_order(p, t.as_ref())?;
            if k >= t.nrows() {
                return Err(DoaError::Config(format!(
                    "order {k} must be below the {}-element (virtual) aperture",
                    t.nrows()
                )));
            }
            let spec = if method == Method::Music {
                let opts = MusicOptions {
                    grid_size: p.grid_size.unwrap_or(MusicOptions::default().grid_size),
                    ..MusicOptions::default()
                };
                spectrum::music(t.as_ref(), k, opts)?
            } else {
                spectrum::esprit(t.as_ref(), k)?
            };
            let mut rep = EstimateReport::new(method, spec);
            rep.order = Some(k);
            rep.order_confident = conf;
            rep
        }
        Method::L21Lasso | Method::L21Svd => {
            let dict = dictionary(geom, p, 8 * n)?;
            let cfg = grid_config(p);
            let lambda = match (p.lambda, p.noise_variance) {
                (Some(lam), _) => lam,
                (None, Some(s)) if s > 0.0 && method == Method::L21Lasso => {
                    gridless::default_lambda(m, n, l, s)?
                }
                _ => {
                    return Err(DoaError::Config(format!(
                        "{method} needs --lambda{}",
                        if method == Method::L21Lasso { " or noise_variance" } else { "" }
                    )))
                }
            };
            let sol = if method == Method::L21Svd {
                let k = order.ok_or_else(|| {
                    DoaError::Config("l21-svd needs the signal-subspace dimension: pass --order K".into())
                })?;
                og::l21_lasso(og::l21_svd_reduce(y, k)?.as_ref(), dict.a.as_ref(), lambda, &cfg)?
            } else {
                og::l21_lasso(y, dict.a.as_ref(), lambda, &cfg)?
            };
            let spec = grid_spectrum(&dict.grid, &sol.row_powers, order, cfg.epsilon_floor);
            EstimateReport::new(method, spec).with_rows(&sol, &dict.grid)
        }
        Method::L21Bpdn => {
            let dict = dictionary(geom, p, 8 * n)?;
            let cfg = grid_config(p);
            let sol = og::l21_bpdn(y, dict.a.as_ref(), ball_eta(p, m, l), &cfg)?;
            let spec = grid_spectrum(&dict.grid, &sol.row_powers, order, cfg.epsilon_floor);
            EstimateReport::new(method, spec).with_rows(&sol, &dict.grid)
        }
        Method::MFocuss => {
            let dict = dictionary(geom, p, 8 * n)?;
            let cfg = grid_config(p);
            let lambda = p.lambda.or(p.noise_variance).unwrap_or(0.0);
            let sol = og::m_focuss(y, dict.a.as_ref(), p.q.unwrap_or(0.5), lambda, &cfg)?;
            let spec = grid_spectrum(&dict.grid, &sol.row_powers, order, cfg.epsilon_floor);
            EstimateReport::new(method, spec).with_rows(&sol, &dict.grid)
        }
        Method::Slim => {
            let dict = dictionary(geom, p, 8 * n)?;
            let cfg = grid_config(p);
            let (sol, eta) = og::slim(y, dict.a.as_ref(), p.q.unwrap_or(0.5), &cfg)?;
            let mut spec = grid_spectrum(&dict.grid, &sol.row_powers, order, cfg.epsilon_floor);
            spec.sigma = Some(eta);
            EstimateReport::new(method, spec).with_rows(&sol, &dict.grid)
        }
        Method::Spice => {
            let dict = dictionary(geom, p, 8 * n)?;
            let cfg = grid_config(p);
            let res = og::spice(y, dict.a.as_ref(), &cfg)?;
            let mut spec = grid_spectrum(&dict.grid, &res.p, order, cfg.epsilon_floor);
            spec.sigma = Some(res.sigma);
            let mut rep = EstimateReport::new(method, spec);
            rep.converged = res.converged;
            rep.iterations = res.iterations;
            rep.objective = res.objective_trace.last().map(|v| v + res.constant);
            rep.objective_trace = Some(res.objective_trace.clone());
            rep.grid = Some(dict.grid.clone());
            rep.support = Some(og::support_of(&res.p, cfg.epsilon_floor));
            rep.row_powers = Some(res.p);
            rep.notes.extend(res.note);
            rep
        }
        Method::MleEm => {
            let dict = dictionary(geom, p, 8 * n)?;
            let iters = p.em_iters.unwrap_or(200);
            let res = og::mle_em(y, dict.a.as_ref(), iters)?;
            let floor = GridSolverConfig::default().epsilon_floor;
            let mut spec = grid_spectrum(&dict.grid, &res.p, order, floor);
            spec.sigma = Some(res.sigma);
            let mut rep = EstimateReport::new(method, spec);
            rep.iterations = res.objective_trace.len().saturating_sub(1);
            rep.objective = res.objective_trace.last().copied();
            rep.objective_trace = Some(res.objective_trace);
            rep.grid = Some(dict.grid.clone());
            rep.support = Some(og::support_of(&res.p, floor));
            rep.row_powers = Some(res.p);
            rep
        }
        Method::OffgridAlt | Method::OffgridJoint => {
            let td = TaylorDictionary::new(geom, uniform_grid(p.grid_size.unwrap_or(2 * n)))?;
            let inner = grid_config(p);
            let sol = if method == Method::OffgridAlt {
                let cfg = OffgridConfig {
                    inner,
                    ..OffgridConfig::default()
                };
                offgrid::offgrid_alternating(y, &td, ball_eta(p, m, l), &cfg)?
            } else {
                let lambda = match (p.lambda, p.noise_variance) {
                    (Some(lam), _) => lam,
                    (None, Some(s)) if s > 0.0 => gridless::default_lambda(m, n, l, s)?,
                    _ => {
                        return Err(DoaError::Config(
                            "offgrid-joint needs --lambda or noise_variance".into(),
                        ))
                    }
                };
                offgrid::offgrid_joint(y, &td, lambda, &inner)?
            };
            let idx = grid_peaks(&sol.row_powers, order, inner.epsilon_floor);
            let spec = LineSpectrum {
                freqs: idx
                    .iter()
                    .map(|&i| crate::array_model::wrap_freq(td.grid[i] + sol.beta[i]))
                    .collect(),
                powers: idx.iter().map(|&i| sol.row_powers[i]).collect(),
                sigma: None,
            };
            let mut rep = EstimateReport::new(method, spec);
            rep.converged = sol.converged;
            rep.iterations = sol.iterations;
            rep.objective = sol.objective_trace.last().copied();
            rep.objective_trace = Some(sol.objective_trace.clone());
            rep.grid = Some(td.grid.clone());
            rep.row_powers = Some(sol.row_powers.clone());
            rep.support = Some(sol.support.clone());
            rep.refined_freqs = Some(sol.refined_freqs.clone());
            rep.beta = Some(sol.beta);
            rep
        }
    };
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal_sim::{simulate, AmplitudeModel, Correlation, SourceScenario};

    fn data(geom: &ArrayGeometry, freqs: &[f64], l: usize, sigma: f64) -> CMat {
        let scn = SourceScenario {
            freqs: freqs.to_vec(),
            powers: vec![1.0; freqs.len()],
            doas_deg: None,
            amplitude: AmplitudeModel::ComplexGaussian,
            correlation: Correlation::default(),
            noise_variance: sigma,
            snapshots: l,
            seed: 7,
        };
        simulate(&scn, geom).unwrap().y
    }

    #[test]
    fn names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
            let js = serde_json::to_string(&m).unwrap();
            assert_eq!(js, format!("\"{}\"", m.name()));
        }
        assert!("root-music".parse::<Method>().is_err());
    }

    #[test]
    fn geometry_support() {
        let ula = ArrayGeometry::ula(8).unwrap();
        let mra = ArrayGeometry::sla(7, vec![1, 2, 5, 7]).unwrap();
        let sparse = ArrayGeometry::sla(10, vec![1, 2, 10]).unwrap();
        let planar = ArrayGeometry::planar(vec![1.0, 1.0, 1.0], vec![0.0, 120.0, 240.0]).unwrap();
        for m in Method::ALL {
            assert!(m.supports(&ula));
            assert!(m.supports(&mra));
            assert!(!m.supports(&planar));
        }
        assert!(!Method::Music.supports(&sparse));
        assert!(Method::Anm.supports(&sparse));
        let y = data(&sparse, &[0.1], 4, 0.0);
        let err = estimate(Method::Music, y.as_ref(), &sparse, &MethodParams { order: Some(1), ..Default::default() });
        assert!(matches!(err, Err(DoaError::UnsupportedGeometry(msg)) if msg.contains("planar: none")));
    }

    #[test]
    fn subspace_methods_demand_order() {
        let g = ArrayGeometry::ula(8).unwrap();
        let y = data(&g, &[0.1, 0.3], 20, 0.01);
        for m in [Method::Music, Method::Esprit, Method::NnmMusic] {
            let err = estimate(m, y.as_ref(), &g, &MethodParams::default()).unwrap_err();
            assert!(err.to_string().contains("--order K or --auto-order"), "{err}");
        }
        let p = MethodParams {
            auto_order: true,
            ..Default::default()
        };
        let rep = estimate(Method::Esprit, y.as_ref(), &g, &p).unwrap();
        assert_eq!(rep.order, Some(2));
        assert_eq!(rep.freqs.len(), 2);
    }

    #[test]
    fn peaks_are_circular_and_ranked() {
        let p = [3.0, 1.0, 0.0, 2.0, 0.5, 4.0];
        assert_eq!(grid_peaks(&p, None, 0.0), vec![5, 3]);
        assert_eq!(grid_peaks(&p, Some(1), 0.0), vec![5]);
        assert_eq!(grid_peaks(&[0.0; 4], None, 0.0), Vec::<usize>::new());
    }

    #[test]
    fn schema_is_uniform_across_snapshot_counts() {
        let g = ArrayGeometry::ula(6).unwrap();
        let keys = |rep: &EstimateReport| -> Vec<String> {
            let v = serde_json::to_value(rep).unwrap();
            let mut k: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
            k.sort();
            k
        };
        let y1 = data(&g, &[0.1, 0.35], 1, 0.0);
        let y5 = data(&g, &[0.1, 0.35], 5, 0.0);
        let a = estimate(Method::Gls, y1.as_ref(), &g, &MethodParams::default()).unwrap();
        let b = estimate(Method::Gls, y5.as_ref(), &g, &MethodParams::default()).unwrap();
        assert_eq!(keys(&a), keys(&b));
        let c = estimate(Method::Spice, y5.as_ref(), &g, &MethodParams::default()).unwrap();
        assert_eq!(keys(&a), keys(&c));
        assert!(a.primal_residual.is_some() && c.primal_residual.is_none());
    }

    #[test]
    fn every_method_runs_on_a_ula() {
        let g = ArrayGeometry::ula(8).unwrap();
        let truth = [-0.2, 0.15];
        let y = data(&g, &truth, 16, 1e-3);
        let p = MethodParams {
            order: Some(2),
            noise_variance: Some(1e-3),
            lambda: None,
            ..Default::default()
        };
        for m in Method::ALL {
            let mut pm = p.clone();
            if m == Method::L21Svd {
                pm.lambda = Some(0.5);
            }
            let rep = estimate(m, y.as_ref(), &g, &pm).unwrap_or_else(|e| panic!("{m}: {e}"));
            let score = spectrum::match_and_score(&truth, &rep.freqs, 0.05);
            assert!(score.success, "{m}: {:?}", rep.freqs);
        }
    }

    #[test]
    fn both_regularizers_is_a_config_error() {
        let g = ArrayGeometry::ula(6).unwrap();
        let y = data(&g, &[0.1], 4, 0.0);
        let p = MethodParams {
            eta: Some(1.0),
            lambda: Some(1.0),
            ..Default::default()
        };
        assert!(matches!(estimate(Method::Anm, y.as_ref(), &g, &p), Err(DoaError::Config(_))));
        let neg = MethodParams {
            eta: Some(-1.0),
            ..Default::default()
        };
        assert!(matches!(estimate(Method::L21Bpdn, y.as_ref(), &g, &neg), Err(DoaError::Config(_))));
    }
}
