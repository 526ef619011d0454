//! Finite-size scaling of eta at the critical point on modest lattices.

use fermibath::channel_maps::DEFAULT_TOL_SING;
use fermibath::scaling::{fit_exponent, log_spaced_sizes, sweep_eta, FitQuantity, GridPolicy};

fn main() -> fermibath::Result<()> {
    let sizes = log_spaced_sizes(100, 4000, 6)?;
    let rows = sweep_eta(&sizes, 0.99, 0.01, &GridPolicy::default(), DEFAULT_TOL_SING)?;
    for r in &rows {
        println!("L = {:>5}  eta = {:.6e}", r.lattice_size, r.eta);
    }
    let pts: Vec<(usize, f64)> = rows.iter().map(|r| (r.lattice_size, r.eta)).collect();
    for q in [FitQuantity::NegEta, FitQuantity::OneMinusEta] {
        let fit = fit_exponent(&pts, q)?;
        println!("{q:?}: slope = {:.4e}  intercept = {:.4}  R^2 = {:.5}", fit.slope, fit.intercept, fit.r_squared);
    }
    Ok(())
}
