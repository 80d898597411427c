//! Subspace and covariance-domain estimators on a many-snapshot scenario,
//! including the coarray route on a minimum-redundancy sparse array.

use sparse_doa::array_model::ArrayGeometry;
use sparse_doa::estimators::{estimate, Method, MethodParams};
use sparse_doa::signal_sim::{simulate, SourceScenario};

fn main() -> sparse_doa::Result<()> {
    let sigma = 0.1;
    let scenario = SourceScenario {
        freqs: vec![-0.25, 0.1],
        powers: vec![1.0, 1.0],
        doas_deg: None,
        amplitude: Default::default(),
        correlation: Default::default(),
        noise_variance: sigma,
        snapshots: 200,
        seed: 3,
    };
    let params = MethodParams {
        order: Some(2),
        noise_variance: Some(sigma),
        ..Default::default()
    };
    for geom in [ArrayGeometry::ula(8)?, ArrayGeometry::sla(7, vec![1, 2, 5, 7])?] {
        let y = simulate(&scenario, &geom)?.y;
        println!("{} sensors, aperture {}", geom.m(), geom.n());
        for m in [Method::Music, Method::Esprit, Method::NnmMusic, Method::AnmCov] {
            let rep = estimate(m, y.as_ref(), &geom, &params)?;
            println!("  {:<10} {:?}", m.name(), rep.freqs);
        }
    }
    Ok(())
}
