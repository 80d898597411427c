//! Array geometry, steering vectors and dictionary diagnostics.
//!
//! Linear arrays place sensor `m` at integer position `Ω_m − 1` (half-wavelength units) on a
//! virtual ULA of aperture `N`. Indices in `Ω` are 1-based everywhere they cross the API.
//! The frequency of a source at DOA `θ` is `f = cos(θ)/2 ∈ (−1/2, 1/2]`.

use crate::error::{DoaError, Result};
use crate::linalg::{expi, singular_values, CMat, C64};
use faer::{Mat, MatRef};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ArrayGeometry {
    Ula { m: usize },
    Sla { n: usize, omega: Vec<usize> },
    /// Polar sensor positions: radius in half-wavelengths, angle in degrees.
    Planar { radii: Vec<f64>, angles_deg: Vec<f64> },
}

impl ArrayGeometry {
    pub fn ula(m: usize) -> Result<Self> {
        let g = ArrayGeometry::Ula { m };
        g.validate()?;
        Ok(g)
    }

    pub fn sla(n: usize, omega: Vec<usize>) -> Result<Self> {
        let g = ArrayGeometry::Sla { n, omega };
        g.validate()?;
        Ok(g)
    }

    pub fn planar(radii: Vec<f64>, angles_deg: Vec<f64>) -> Result<Self> {
        let g = ArrayGeometry::Planar { radii, angles_deg };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ArrayGeometry::Ula { m } => {
                if *m == 0 {
                    return Err(DoaError::InvalidGeometry("ULA needs M >= 1".into()));
                }
            }
            ArrayGeometry::Sla { n, omega } => {
                if omega.is_empty() {
                    return Err(DoaError::InvalidGeometry("empty index set".into()));
                }
                if omega[0] < 1 || *omega.last().unwrap() > *n {
                    return Err(DoaError::InvalidGeometry(format!(
                        "indices must lie in 1..={n}"
                    )));
                }
                if omega.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(DoaError::InvalidGeometry(
                        "indices must be strictly increasing".into(),
                    ));
                }
            }
            ArrayGeometry::Planar { radii, angles_deg } => {
                if radii.is_empty() || radii.len() != angles_deg.len() {
                    return Err(DoaError::InvalidGeometry(
                        "radii and angles must be nonempty and equal length".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Number of physical sensors M.
    pub fn m(&self) -> usize {
        match self {
            ArrayGeometry::Ula { m } => *m,
            ArrayGeometry::Sla { omega, .. } => omega.len(),
            ArrayGeometry::Planar { radii, .. } => radii.len(),
        }
    }

    /// Virtual aperture N (linear arrays); M for planar.
    pub fn n(&self) -> usize {
        match self {
            ArrayGeometry::Ula { m } => *m,
            ArrayGeometry::Sla { n, .. } => *n,
            ArrayGeometry::Planar { radii, .. } => radii.len(),
        }
    }

    pub fn is_linear(&self) -> bool {
        !matches!(self, ArrayGeometry::Planar { .. })
    }

    /// True for a ULA or an SLA that uses every index.
    pub fn is_full(&self) -> bool {
        self.is_linear() && self.m() == self.n()
    }

    /// 1-based sensor indices Ω.
    pub fn omega(&self) -> Result<Vec<usize>> {
        match self {
            ArrayGeometry::Ula { m } => Ok((1..=*m).collect()),
            ArrayGeometry::Sla { omega, .. } => Ok(omega.clone()),
            ArrayGeometry::Planar { .. } => Err(DoaError::UnsupportedGeometry(
                "planar arrays have no index set".into(),
            )),
        }
    }

    /// 0-based sensor positions on the virtual ULA.
    pub fn positions(&self) -> Result<Vec<usize>> {
        Ok(self.omega()?.iter().map(|&o| o - 1).collect())
    }

    pub fn require_linear(&self) -> Result<()> {
        if self.is_linear() {
            Ok(())
        } else {
            Err(DoaError::UnsupportedGeometry(
                "estimator requires a linear array".into(),
            ))
        }
    }
}

/// Wraps a frequency into (−1/2, 1/2].
pub fn wrap_freq(f: f64) -> f64 {
    let mut g = f - f.round();
    if g <= -0.5 {
        g += 1.0;
    }
    g
}

/// Wrap-around distance on the unit circle 𝕋.
pub fn wrap_dist(a: f64, b: f64) -> f64 {
    wrap_freq(a - b).abs()
}

/// Minimum pairwise wrap-around separation; infinite for fewer than two frequencies.
pub fn min_separation(freqs: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..freqs.len() {
        for j in i + 1..freqs.len() {
            best = best.min(wrap_dist(freqs[i], freqs[j]));
        }
    }
    best
}

pub fn check_freq(f: f64) -> Result<()> {
    if f.is_finite() && f > -0.5 && f <= 0.5 {
        Ok(())
    } else {
        Err(DoaError::Domain(format!("frequency {f} outside (-1/2, 1/2]")))
    }
}

/// f = cos(θ)/2 for θ ∈ [0°, 180°).
pub fn doa_to_freq(theta_deg: f64) -> Result<f64> {
    if !(0.0..180.0).contains(&theta_deg) {
        return Err(DoaError::Domain(format!("DOA {theta_deg} outside [0, 180)")));
    }
    Ok((theta_deg * PI / 180.0).cos() / 2.0)
}

/// θ = arccos(2f) in degrees.
pub fn freq_to_doa(f: f64) -> Result<f64> {
    check_freq(f)?;
    Ok((2.0 * f).clamp(-1.0, 1.0).acos() * 180.0 / PI)
}

/// Steering vector at the given 0-based positions, no domain check.
pub fn steer(pos: &[usize], f: f64) -> Vec<C64> {
    pos.iter().map(|&p| expi(2.0 * PI * p as f64 * f)).collect()
}

/// Full N-element ULA steering vector.
pub fn steer_ula(n: usize, f: f64) -> Vec<C64> {
    (0..n).map(|p| expi(2.0 * PI * p as f64 * f)).collect()
}

/// Steering vector of a linear array at frequency `f`.
pub fn steering_vector(geom: &ArrayGeometry, f: f64) -> Result<Vec<C64>> {
    check_freq(f)?;
    match geom {
        ArrayGeometry::Planar { .. } => Err(DoaError::Domain(
            "planar arrays accept a DOA, not a frequency".into(),
        )),
        _ => Ok(steer(&geom.positions()?, f)),
    }
}

/// Steering vector from a DOA in degrees; the only entry point for planar arrays.
pub fn steering_vector_doa(geom: &ArrayGeometry, theta_deg: f64) -> Result<Vec<C64>> {
    match geom {
        ArrayGeometry::Planar { radii, angles_deg } => {
            if !(0.0..360.0).contains(&theta_deg) {
                return Err(DoaError::Domain(format!("DOA {theta_deg} outside [0, 360)")));
            }
            let th = theta_deg * PI / 180.0;
            Ok(radii
                .iter()
                .zip(angles_deg)
                .map(|(&r, &a)| expi(PI * r * (th - a * PI / 180.0).cos()))
                .collect())
        }
        _ => steering_vector(geom, doa_to_freq(theta_deg)?),
    }
}

/// Uniform frequency grid of size `n_bar` covering (−1/2, 1/2].
pub fn uniform_grid(n_bar: usize) -> Vec<f64> {
    (0..n_bar)
        .map(|k| -0.5 + (k + 1) as f64 / n_bar as f64)
        .collect()
}

/// Steering matrix A(f) for a linear array, no domain check.
pub fn steering_matrix(pos: &[usize], freqs: &[f64]) -> CMat {
    Mat::from_fn(pos.len(), freqs.len(), |m, k| {
        expi(2.0 * PI * pos[m] as f64 * freqs[k])
    })
}

#[derive(Clone, Debug)]
pub struct SteeringDictionary {
    pub geometry: ArrayGeometry,
    pub grid: Vec<f64>,
    pub a: CMat,
}

impl SteeringDictionary {
    pub fn new(geometry: &ArrayGeometry, grid: Vec<f64>) -> Result<Self> {
        geometry.require_linear()?;
        for &f in &grid {
            check_freq(f)?;
        }
        let a = steering_matrix(&geometry.positions()?, &grid);
        Ok(SteeringDictionary {
            geometry: geometry.clone(),
            grid,
            a,
        })
    }

    /// Uniform grid with N̄ = 8M points.
    pub fn default_for(geometry: &ArrayGeometry) -> Result<Self> {
        Self::new(geometry, uniform_grid(8 * geometry.m()))
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

fn col_norm(a: MatRef<'_, C64>, j: usize) -> f64 {
    (0..a.nrows()).map(|i| a[(i, j)].norm_sqr()).sum::<f64>().sqrt()
}

pub fn mutual_coherence(a: MatRef<'_, C64>) -> Result<f64> {
    if a.ncols() < 2 {
        return Err(DoaError::Degenerate("need at least two columns".into()));
    }
    let norms: Vec<f64> = (0..a.ncols()).map(|j| col_norm(a, j)).collect();
    if norms.iter().any(|&n| n == 0.0) {
        return Err(DoaError::Degenerate("zero column".into()));
    }
    let g = a.adjoint() * a;
    let mut mu: f64 = 0.0;
    for i in 0..a.ncols() {
        for j in i + 1..a.ncols() {
            mu = mu.max(g[(i, j)].norm() / (norms[i] * norms[j]));
        }
    }
    Ok(mu.min(1.0))
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
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

/// Smallest number of linearly dependent columns, by exhaustive enumeration.
/// Returns M+1 when every subset of size ≤ M is independent. `rank_tol` is relative to
/// the largest singular value of `a` (default 1e−9).
pub fn spark_bruteforce(a: MatRef<'_, C64>, rank_tol: Option<f64>) -> Result<usize> {
    let (m, n) = (a.nrows(), a.ncols());
    if n > 20 {
        return Err(DoaError::SizeLimit(format!("{n} columns, limit is 20")));
    }
    let smax = singular_values(a).first().copied().unwrap_or(0.0);
    let tol = rank_tol.unwrap_or(1e-9) * smax;
    for k in 1..=m.min(n) {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let sub = Mat::from_fn(m, k, |i, j| a[(i, idx[j])]);
            let s = singular_values(sub.as_ref());
            if s.last().copied().unwrap_or(0.0) <= tol {
                return Ok(k);
            }
            if !next_combination(&mut idx, n) {
                break;
            }
        }
    }
    // n > m: any m+1 columns in an m-dimensional space are dependent.
    Ok(m + 1)
}

/// Uniqueness condition K < (spark − 1 + rank(Y))/2.
pub fn identifiability_check(spark: usize, rank_y: usize, k: usize) -> bool {
    2 * k < spark + rank_y - 1
}

/// Row-selection matrix Γ_Ω (M×N) with Γ_Ω y = y_Ω.
pub fn row_selector(geom: &ArrayGeometry) -> Result<CMat> {
    let pos = geom.positions()?;
    let n = geom.n();
    Ok(Mat::from_fn(pos.len(), n, |i, j| {
        if pos[i] == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// Rows of `x` at the 0-based positions.
pub fn select_rows(x: MatRef<'_, C64>, pos: &[usize]) -> CMat {
    Mat::from_fn(pos.len(), x.ncols(), |i, j| x[(pos[i], j)])
}
