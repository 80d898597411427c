//! EMaC: complete a spectrally sparse signal observed on a random subset of sensors.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use sparse_doa::array_model::ArrayGeometry;
use sparse_doa::gridless::{emac, AnmMode};
use sparse_doa::sdp_admm::AdmmConfig;
use sparse_doa::signal_sim::{simulate, SourceScenario};

fn main() -> sparse_doa::Result<()> {
    let n = 32;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let mut omega: Vec<usize> = (1..=n).collect();
    omega.shuffle(&mut rng);
    omega.truncate(20);
    omega.sort_unstable();
    let geom = ArrayGeometry::sla(n, omega)?;

    let scenario = SourceScenario {
        freqs: vec![-0.12, 0.21],
        powers: vec![1.0, 0.8],
        doas_deg: None,
        amplitude: Default::default(),
        correlation: Default::default(),
        noise_variance: 0.0,
        snapshots: 1,
        seed: 2,
    };
    let y = simulate(&scenario, &geom)?.y;
    let r = emac(y.as_ref(), &geom, None, AnmMode::Exact, Some(2), &AdmmConfig::with_tol(1e-7))?;
    println!("observed {} of {} samples", geom.m(), n);
    println!("recovered {:?}", r.spectrum.sorted().freqs);
    Ok(())
}
