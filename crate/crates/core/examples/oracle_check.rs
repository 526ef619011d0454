//! Product formula against dense diagonalization on an 8-site ring.

use fermibath::echo_engine::decoherence_factor;
use fermibath::ising_env::{build_spectrum, IsingParams};
use fermibath::oracle::OracleEvolution;

fn main() -> fermibath::Result<()> {
    let (l, lambda, delta) = (8, 0.5, 0.25);
    let spec = build_spectrum(&IsingParams::new(l, lambda, delta)?)?;
    let dense = OracleEvolution::new(l, lambda, delta)?;
    let mut worst: f64 = 0.0;
    for i in 0..=40 {
        let t = i as f64 * 0.5;
        let d = (decoherence_factor(&spec, t) - dense.decoherence_factor(t)).norm();
        worst = worst.max(d);
    }
    println!("ground energy: modes {:.12} dense {:.12}", spec.ground_energy_g(), dense.ground_energy_g());
    println!("max |x_modes - x_dense| over t in [0, 20]: {worst:.3e}");
    Ok(())
}
