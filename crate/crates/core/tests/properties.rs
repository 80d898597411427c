use faer::Mat;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use sparse_doa::array_model::{identifiability_check, min_separation, wrap_dist, wrap_freq, ArrayGeometry};
use sparse_doa::bench::trial_seed;
use sparse_doa::estimators::grid_peaks;
use sparse_doa::gridless::next_combination;
use sparse_doa::signal_sim::{coarray_average, hankel_adjoint, hankel_lift, toeplitz, toeplitz_param};
use sparse_doa::spectrum::{vandermonde_decompose, DEFAULT_RANK_TOL};
use std::f64::consts::PI;

fn well_separated(raw: Vec<f64>, sep: f64) -> Vec<f64> {
    let mut f: Vec<f64> = Vec::new();
    for g in raw {
        if f.iter().all(|&h| wrap_dist(g, h) >= sep) {
            f.push(g);
        }
    }
    f
}

proptest! {
    #[test]
    fn wrap_freq_lands_in_half_open_interval(f in -1e3f64..1e3) {
        let g = wrap_freq(f);
        prop_assert!(g > -0.5 && g <= 0.5);
        prop_assert!(((f - g) - (f - g).round()).abs() < 1e-9);
        prop_assert_eq!(wrap_freq(g), g);
    }

    #[test]
    fn wrap_dist_is_a_symmetric_circular_distance(a in -2f64..2.0, b in -2f64..2.0) {
        let d = wrap_dist(a, b);
        prop_assert!((0.0..=0.5).contains(&d));
        prop_assert!((d - wrap_dist(b, a)).abs() < 1e-12);
        prop_assert!(wrap_dist(a, a + 3.0) < 1e-9);
    }

    #[test]
    fn toeplitz_of_a_line_spectrum_is_hermitian_psd(
        freqs in prop::collection::vec(-0.5f64..0.5, 0..4),
        n in 2usize..10,
    ) {
        let powers = vec![1.0; freqs.len()];
        let t = toeplitz(&toeplitz_param(&freqs, &powers, n));
        let mut xs = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                prop_assert!((t[(i, j)] - t[(j, i)].conj()).norm() < 1e-12);
                if i > 0 && j > 0 {
                    prop_assert!((t[(i, j)] - t[(i - 1, j - 1)]).norm() < 1e-12);
                }
            }
            xs[i] = C64::from_polar(1.0, i as f64);
        }
        let quad: C64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| xs[i].conj() * t[(i, j)] * xs[j]).sum();
        prop_assert!(quad.re > -1e-9);
    }

    #[test]
    fn vandermonde_round_trip_small(
        raw in prop::collection::vec(-0.5f64..0.5, 1..4),
        p in prop::collection::vec(0.5f64..2.0, 4),
    ) {
        let n = 8;
        let f = well_separated(raw, 1.5 / n as f64);
        let powers = &p[..f.len()];
        let t = toeplitz(&toeplitz_param(&f, powers, n));
        let s = vandermonde_decompose(t.as_ref(), DEFAULT_RANK_TOL).unwrap();
        prop_assert_eq!(s.len(), f.len());
        let rec = s.covariance(n);
        for i in 0..n {
            for j in 0..n {
                prop_assert!((rec[(i, j)] - t[(i, j)]).norm() < 1e-8);
            }
        }
        prop_assert!(s.powers.iter().all(|&q| q > 0.0));
        if f.len() > 1 {
            prop_assert!(min_separation(&s.freqs) > 1.0 / n as f64);
        }
    }

    #[test]
    fn coarray_average_is_exact_on_full_ula(raw in prop::collection::vec(-0.5f64..0.5, 1..3), n in 3usize..9) {
        let geom = ArrayGeometry::ula(n).unwrap();
        let powers = vec![1.0; raw.len()];
        let u = toeplitz_param(&raw, &powers, n);
        let r = toeplitz(&u);
        let v = coarray_average(r.as_ref(), &geom).unwrap();
        for (a, b) in u.iter().zip(&v) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn hankel_adjoint_matches_inner_product(nn in 3usize..10, l in 1usize..3, seed in 0u64..1000) {
        let m = nn.div_ceil(2);
        let val = |i: usize, j: usize, s: u64| C64::from_polar(1.0, (i * 7 + j * 3) as f64 + s as f64 * 0.1);
        let z = Mat::from_fn(nn, l, |i, j| val(i, j, seed));
        let h = hankel_lift(z.as_ref(), m).unwrap();
        let w = Mat::from_fn(h.nrows(), h.ncols(), |i, j| val(i, j, seed + 1) * 0.5);
        let hz = hankel_adjoint(w.as_ref(), nn, l);
        let lhs: C64 = (0..h.nrows()).flat_map(|i| (0..h.ncols()).map(move |j| (i, j))).map(|(i, j)| w[(i, j)].conj() * h[(i, j)]).sum();
        let rhs: C64 = (0..nn).flat_map(|i| (0..l).map(move |j| (i, j))).map(|(i, j)| hz[(i, j)].conj() * z[(i, j)]).sum();
        prop_assert!((lhs - rhs).norm() < 1e-9 * lhs.norm().max(1.0));
    }

    #[test]
    fn trial_seed_is_deterministic_and_injective_in_trials(seed: u64, point in 0usize..100) {
        let seeds: Vec<u64> = (0..64).map(|t| trial_seed(seed, point, t)).collect();
        prop_assert_eq!(&seeds, &(0..64).map(|t| trial_seed(seed, point, t)).collect::<Vec<_>>());
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), seeds.len());
    }

    #[test]
    fn grid_peaks_returns_strongest_local_maxima(
        powers in prop::collection::vec(0.0f64..1.0, 3..40),
        k in 1usize..5,
    ) {
        let n = powers.len();
        let peaks = grid_peaks(&powers, Some(k), 0.0);
        prop_assert!(peaks.len() <= k);
        for w in peaks.windows(2) {
            prop_assert!(powers[w[0]] >= powers[w[1]]);
        }
        for &i in &peaks {
            prop_assert!(powers[i] >= powers[(i + n - 1) % n] && powers[i] >= powers[(i + 1) % n]);
        }
    }

    #[test]
    fn next_combination_enumerates_binomial(n in 1usize..9, k in 1usize..5) {
        prop_assume!(k <= n);
        let mut idx: Vec<usize> = (0..k).collect();
        let mut count = 1u64;
        while next_combination(&mut idx, n) {
            prop_assert!(idx.windows(2).all(|w| w[0] < w[1]) && idx[k - 1] < n);
            count += 1;
        }
        let binom = (0..k as u64).fold(1u64, |acc, i| acc * (n as u64 - i) / (i + 1));
        prop_assert_eq!(count, binom);
    }

    #[test]
    fn identifiability_is_monotone(spark in 2usize..20, rank in 1usize..10, k in 1usize..20) {
        if identifiability_check(spark, rank, k + 1) {
            prop_assert!(identifiability_check(spark, rank, k));
        }
        if identifiability_check(spark, rank, k) {
            prop_assert!(identifiability_check(spark, rank + 1, k));
        }
    }
}

#[test]
fn steering_phase_convention() {
    let u = toeplitz_param(&[0.125], &[1.0], 3);
    assert!((u[1] - C64::from_polar(1.0, -2.0 * PI * 0.125)).norm() < 1e-15);
}
