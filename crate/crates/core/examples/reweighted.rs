//! Two sources closer than 1/N: plain ANM against reweighted atomic norm minimization.

use sparse_doa::array_model::ArrayGeometry;
use sparse_doa::gridless::{anm, ram, AnmMode, RamConfig};
use sparse_doa::sdp_admm::AdmmConfig;
use sparse_doa::signal_sim::{simulate, SourceScenario};

fn main() -> sparse_doa::Result<()> {
    let n = 16;
    let (l, sigma) = (10, 0.01);
    let geom = ArrayGeometry::ula(n)?;
    let f0 = 0.1;
    let scenario = SourceScenario {
        freqs: vec![f0, f0 + 0.6 / n as f64],
        powers: vec![1.0, 1.0],
        doas_deg: None,
        amplitude: Default::default(),
        correlation: Default::default(),
        noise_variance: sigma,
        snapshots: l,
        seed: 11,
    };
    let y = simulate(&scenario, &geom)?.y;
    let eta = (sigma * (n * l) as f64).sqrt();
    let cfg = AdmmConfig::with_tol(1e-6);

    let a = anm(y.as_ref(), &geom, AnmMode::Ball(eta), &cfg)?;
    println!("truth {:?}", scenario.freqs);
    println!("ANM   {:?}", a.spectrum.strongest(2).sorted().freqs);
    let r = ram(y.as_ref(), &geom, AnmMode::Ball(eta), &RamConfig::default(), &cfg)?;
    println!("RAM   {:?}", r.spectrum.clone().strongest(2).sorted().freqs);
    for step in &r.trace {
        println!("  ε {:.2e}: surrogate {:.4} -> {:.4}", step.epsilon, step.before, step.value());
    }
    Ok(())
}
