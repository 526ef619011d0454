//! Decay and first revival of the echo as the ring grows.
//! The revival time should roughly double with L.

use fermibath::echo_engine::trace_over_grid;
use fermibath::ising_env::{build_spectrum, IsingParams};
use fermibath::nonmarkov::revival_stats;
use fermibath::scaling::GridPolicy;

fn main() -> fermibath::Result<()> {
    let policy = GridPolicy::default();
    println!("{:>6} {:>12} {:>12} {:>10} {:>12}", "L", "L_dec", "L_rev", "tau", "implied eta");
    for l in [50, 100, 200, 400] {
        let spec = build_spectrum(&IsingParams::new(l, 1.0, 0.1)?)?;
        let trace = trace_over_grid(&spec, &policy.grid_for(l)?);
        let r = revival_stats(&trace)?;
        println!("{l:>6} {:>12.4e} {:>12.4e} {:>10.3} {:>12.4e}", r.l_dec, r.l_rev, r.tau, r.implied_eta());
    }
    Ok(())
}
