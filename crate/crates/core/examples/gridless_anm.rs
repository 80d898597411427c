//! Atomic norm and gridless SPICE on a full and a sparse linear array.

use sparse_doa::array_model::ArrayGeometry;
use sparse_doa::gridless::{anm, gls, AnmMode};
use sparse_doa::sdp_admm::AdmmConfig;
use sparse_doa::signal_sim::{simulate, SourceScenario};

fn main() -> sparse_doa::Result<()> {
    let scenario = SourceScenario {
        freqs: vec![-0.2, 0.05, 0.18],
        powers: vec![1.0, 1.0, 1.0],
        doas_deg: None,
        amplitude: Default::default(),
        correlation: Default::default(),
        noise_variance: 0.0,
        snapshots: 1,
        seed: 7,
    };
    let cfg = AdmmConfig::with_tol(1e-7);
    for geom in [
        ArrayGeometry::ula(24)?,
        ArrayGeometry::sla(24, vec![1, 2, 4, 5, 8, 11, 13, 14, 17, 19, 20, 22, 24])?,
    ] {
        let y = simulate(&scenario, &geom)?.y;
        let a = anm(y.as_ref(), &geom, AnmMode::Exact, &cfg)?;
        let g = gls(y.as_ref(), &geom, &cfg)?;
        println!("{} sensors of {}", geom.m(), geom.n());
        println!("  ANM  {:?} ({} iterations)", a.spectrum.clone().sorted().freqs, a.solution.iterations);
        println!("  GLS  {:?}", g.spectrum.clone().sorted().freqs);
    }
    Ok(())
}
