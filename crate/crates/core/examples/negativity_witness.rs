//! Entanglement witness N across the critical point, for a weak coupling.
//! Inside the light-cone window N vanishes at lambda_eff = 1, as long as L
//! stays below about 1/delta; past that the quench from lambda = 1 - delta
//! revives on its own.

use fermibath::ising_env::IsingParams;
use fermibath::nonmarkov::finite_size_window;
use fermibath::scaling::{witness_point, GridPolicy};

fn main() -> fermibath::Result<()> {
    let l = 400;
    let delta = 0.01;
    let policy = GridPolicy::default();
    for lambda_eff in [0.8, 0.9, 0.95, 1.0, 1.05, 1.1, 1.2] {
        let p = IsingParams::new(l, lambda_eff - delta, delta)?;
        let window = finite_size_window(l, p.lambda_eff(), p.coupling_j);
        let n = witness_point(l, p.lambda, delta, &policy)?;
        println!("lambda_eff = {lambda_eff:.2}  window = {window:8.2}  N = {n:.6e}");
    }
    Ok(())
}
