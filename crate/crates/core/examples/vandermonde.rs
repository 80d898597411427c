//! Build a Toeplitz covariance from a known line spectrum and take it apart again.

use sparse_doa::signal_sim::{toeplitz, toeplitz_param};
use sparse_doa::spectrum::{noise_split_decompose, vandermonde_decompose, DEFAULT_RANK_TOL};

fn main() -> sparse_doa::Result<()> {
    let freqs = [-0.31, 0.02, 0.27];
    let powers = [1.0, 0.5, 2.0];
    let n = 12;

    let t = toeplitz(&toeplitz_param(&freqs, &powers, n));
    let s = vandermonde_decompose(t.as_ref(), DEFAULT_RANK_TOL)?.sorted();
    println!("noiseless: freqs {:?}", s.freqs);
    println!("           powers {:?}", s.powers);

    // Add white noise to the diagonal; the split recovers σ as the smallest eigenvalue.
    let sigma = 0.3;
    let mut u = toeplitz_param(&freqs, &powers, n);
    u[0] += sigma;
    let s = noise_split_decompose(toeplitz(&u).as_ref(), DEFAULT_RANK_TOL)?.sorted();
    println!("noisy:     sigma {:.6} freqs {:?}", s.sigma.unwrap_or(0.0), s.freqs);
    Ok(())
}
