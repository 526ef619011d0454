//! Decoherence factor and Loschmidt echo of one qubit on a 100-site Ising ring.

use fermibath::echo_engine::{decoherence_factor, loschmidt_echo};
use fermibath::ising_env::{build_spectrum, IsingParams};

fn main() -> fermibath::Result<()> {
    let spec = build_spectrum(&IsingParams::new(100, 0.8, 0.1)?)?;
    println!("E_g = {:.6}  E_e = {:.6}", spec.ground_energy_g(), spec.ground_energy_e());
    println!("{:>6} {:>12} {:>12} {:>10}", "t", "Re x", "Im x", "L(t)");
    for i in 0..=20 {
        let t = i as f64 * 2.5;
        let x = decoherence_factor(&spec, t);
        println!("{t:>6.1} {:>12.6} {:>12.6} {:>10.6}", x.re, x.im, loschmidt_echo(&spec, t));
    }
    Ok(())
}
