//! On-grid sparse recovery: ℓ2,1 LASSO/BPDN, SPICE, SLIM, M-FOCUSS and sparse Bayesian EM.

use sparse_doa::array_model::ArrayGeometry;
use sparse_doa::estimators::{estimate, Method, MethodParams};
use sparse_doa::signal_sim::{simulate, SourceScenario};

fn main() -> sparse_doa::Result<()> {
    let geom = ArrayGeometry::ula(10)?;
    let sigma = 0.05;
    let scenario = SourceScenario {
        freqs: vec![-0.3, 0.0125, 0.2],
        powers: vec![1.0, 1.0, 0.5],
        doas_deg: None,
        amplitude: Default::default(),
        correlation: Default::default(),
        noise_variance: sigma,
        snapshots: 20,
        seed: 9,
    };
    let y = simulate(&scenario, &geom)?.y;
    let params = MethodParams {
        order: Some(3),
        noise_variance: Some(sigma),
        ..Default::default()
    };
    println!("truth {:?}", scenario.freqs);
    for m in [Method::L21Lasso, Method::L21Bpdn, Method::Spice, Method::Slim, Method::MFocuss, Method::MleEm] {
        let rep = estimate(m, y.as_ref(), &geom, &params)?;
        println!("{:<10} {:?} ({} iterations)", m.name(), rep.freqs, rep.iterations);
    }
    Ok(())
}
