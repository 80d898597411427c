//! Dense complex helpers over faer.

use faer::linalg::solvers::{Solve, SolveLstsq};
use faer::{Mat, MatRef, Side};
pub use num_complex::Complex64 as C64;

pub type CMat = Mat<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };
pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[inline]
pub fn cx(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn expi(phase: f64) -> C64 {
    C64::new(phase.cos(), phase.sin())
}

pub fn zeros(r: usize, c: usize) -> CMat {
    Mat::zeros(r, c)
}

pub fn eye(n: usize) -> CMat {
    Mat::identity(n, n)
}

pub fn from_col(v: &[C64]) -> CMat {
    Mat::from_fn(v.len(), 1, |i, _| v[i])
}

pub fn col_vec(a: MatRef<'_, C64>, j: usize) -> Vec<C64> {
    (0..a.nrows()).map(|i| a[(i, j)]).collect()
}

pub fn adjoint(a: MatRef<'_, C64>) -> CMat {
    a.adjoint().to_owned()
}

pub fn scale(a: MatRef<'_, C64>, s: f64) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

/// (A + Aᴴ)/2.
pub fn hermitian_part(a: MatRef<'_, C64>) -> CMat {
    let n = a.nrows();
    Mat::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

pub fn frob(a: MatRef<'_, C64>) -> f64 {
    a.norm_l2()
}

pub fn frob2(a: MatRef<'_, C64>) -> f64 {
    a.squared_norm_l2()
}

pub fn trace(a: MatRef<'_, C64>) -> C64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

/// Re tr(Aᴴ B).
pub fn inner_re(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let x = a[(i, j)];
            let y = b[(i, j)];
            s += x.re * y.re + x.im * y.im;
        }
    }
    s
}

/// ‖A − B‖_F / max(‖B‖_F, floor).
pub fn rel_diff(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> f64 {
    let d = Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] - b[(i, j)]);
    d.norm_l2() / b.norm_l2().max(1e-300)
}

pub struct HermEig {
    /// Ascending.
    pub values: Vec<f64>,
    pub vectors: CMat,
}

pub fn herm_eig(a: MatRef<'_, C64>) -> HermEig {
    let h = hermitian_part(a);
    let e = h
        .self_adjoint_eigen(Side::Lower)
        .expect("hermitian eigendecomposition failed");
    let values = (0..h.nrows()).map(|i| e.S()[i].re).collect();
    HermEig {
        values,
        vectors: e.U().to_owned(),
    }
}

pub fn herm_eigenvalues(a: MatRef<'_, C64>) -> Vec<f64> {
    let h = hermitian_part(a);
    h.self_adjoint_eigenvalues(Side::Lower)
        .expect("hermitian eigenvalues failed")
}

/// U f(Λ) Uᴴ.
pub fn herm_map(a: MatRef<'_, C64>, f: impl Fn(f64) -> f64) -> CMat {
    let e = herm_eig(a);
    rebuild(&e, f)
}

pub fn rebuild(e: &HermEig, f: impl Fn(f64) -> f64) -> CMat {
    let n = e.vectors.nrows();
    let keep: Vec<(usize, f64)> = e
        .values
        .iter()
        .enumerate()
        .map(|(k, &l)| (k, f(l)))
        .filter(|&(_, v)| v != 0.0)
        .collect();
    let us = Mat::from_fn(n, keep.len(), |i, j| e.vectors[(i, keep[j].0)] * keep[j].1);
    let u = Mat::from_fn(n, keep.len(), |i, j| e.vectors[(i, keep[j].0)]);
    &us * u.adjoint()
}

/// Nearest PSD matrix in Frobenius norm.
pub fn psd_project(a: MatRef<'_, C64>) -> CMat {
    herm_map(a, |l| l.max(0.0))
}

pub fn psd_sqrt(a: MatRef<'_, C64>) -> CMat {
    herm_map(a, |l| l.max(0.0).sqrt())
}

/// Inverse of a Hermitian positive definite matrix.
pub fn hpd_inverse(a: MatRef<'_, C64>) -> CMat {
    let h = hermitian_part(a);
    match h.llt(Side::Lower) {
        Ok(llt) => llt.solve(eye(h.nrows())),
        Err(_) => herm_map(h.as_ref(), |l| 1.0 / l),
    }
}

pub fn solve(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> CMat {
    a.partial_piv_lu().solve(b)
}

pub fn hpd_solve(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> CMat {
    let h = hermitian_part(a);
    match h.llt(Side::Lower) {
        Ok(llt) => llt.solve(b),
        Err(_) => h.partial_piv_lu().solve(b),
    }
}

pub struct Svd {
    pub u: CMat,
    /// Descending.
    pub s: Vec<f64>,
    pub v: CMat,
}

pub fn thin_svd(a: MatRef<'_, C64>) -> Svd {
    let d = a.thin_svd().expect("svd failed");
    let k = a.nrows().min(a.ncols());
    Svd {
        u: d.U().to_owned(),
        s: (0..k).map(|i| d.S()[i].re).collect(),
        v: d.V().to_owned(),
    }
}

pub fn singular_values(a: MatRef<'_, C64>) -> Vec<f64> {
    let mut s = a.singular_values().expect("svd failed");
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

pub fn spectral_norm(a: MatRef<'_, C64>) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Moore–Penrose pseudoinverse with relative singular value cutoff.
pub fn pinv(a: MatRef<'_, C64>, rtol: f64) -> CMat {
    let d = thin_svd(a);
    let cut = d.s.first().copied().unwrap_or(0.0) * rtol;
    let k = d.s.iter().filter(|&&s| s > cut).count();
    let vs = Mat::from_fn(a.ncols(), k, |i, j| d.v[(i, j)] / d.s[j]);
    let u = d.u.subcols(0, k);
    &vs * u.adjoint()
}

pub fn eigenvalues(a: MatRef<'_, C64>) -> Vec<C64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    a.eigenvalues().expect("eigenvalue computation failed")
}

pub fn hstack(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> CMat {
    let (m, p, q) = (a.nrows(), a.ncols(), b.ncols());
    Mat::from_fn(m, p + q, |i, j| if j < p { a[(i, j)] } else { b[(i, j - p)] })
}

pub fn row_norms2(x: MatRef<'_, C64>) -> Vec<f64> {
    (0..x.nrows())
        .map(|i| (0..x.ncols()).map(|j| x[(i, j)].norm_sqr()).sum())
        .collect()
}

/// Least squares min ‖Ax − b‖ for real full-column-rank A.
pub fn lstsq_real(a: MatRef<'_, f64>, b: &[f64]) -> Vec<f64> {
    let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
    let x = a.qr().solve_lstsq(rhs);
    (0..a.ncols()).map(|i| x[(i, 0)]).collect()
}

/// Nonnegative least squares (Lawson–Hanson active set).
pub fn nnls(a: MatRef<'_, f64>, b: &[f64]) -> Vec<f64> {
    let (m, n) = (a.nrows(), a.ncols());
    let mut x = vec![0.0; n];
    let mut passive = vec![false; n];
    let anorm = a.norm_l2().max(1e-300);
    let tol = 10.0 * f64::EPSILON * anorm * (m.max(n) as f64);
    let grad = |x: &[f64]| -> Vec<f64> {
        let r: Vec<f64> = (0..m)
            .map(|i| b[i] - (0..n).map(|j| a[(i, j)] * x[j]).sum::<f64>())
            .collect();
        (0..n).map(|j| (0..m).map(|i| a[(i, j)] * r[i]).sum()).collect()
    };
    for _ in 0..3 * n + 10 {
        let w = grad(&x);
        let cand = (0..n)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].partial_cmp(&w[j]).unwrap());
        let Some(j) = cand else { break };
        passive[j] = true;
        for _ in 0..3 * n + 10 {
            let idx: Vec<usize> = (0..n).filter(|&k| passive[k]).collect();
            let sub = Mat::from_fn(m, idx.len(), |i, k| a[(i, idx[k])]);
            let sp = lstsq_real(sub.as_ref(), b);
            let mut s = vec![0.0; n];
            for (k, &i) in idx.iter().enumerate() {
                s[i] = sp[k];
            }
            if idx.iter().all(|&i| s[i] > 0.0) {
                x = s;
                break;
            }
            let mut alpha = f64::INFINITY;
            for &i in &idx {
                if s[i] <= 0.0 {
                    alpha = alpha.min(x[i] / (x[i] - s[i]));
                }
            }
            for i in 0..n {
                x[i] += alpha * (s[i] - x[i]);
                if passive[i] && x[i] <= tol {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
        }
    }
    x
}
