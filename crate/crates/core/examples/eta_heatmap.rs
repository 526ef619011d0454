//! Full (t_m, t_f) map of the intermediate-map negativity, written as SVG.

use fermibath::channel_maps::DEFAULT_TOL_SING;
use fermibath::echo_engine::{trace_over_grid, TimeGrid};
use fermibath::ising_env::{build_spectrum, IsingParams};
use fermibath::nonmarkov::{eta, eta_heatmap};
use fermibath::svg;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = build_spectrum(&IsingParams::new(40, 0.9, 0.2)?)?;
    let grid = TimeGrid::new(0.0, 40.0, 300)?;
    let trace = trace_over_grid(&spec, &grid);

    let scan = eta(&trace, DEFAULT_TOL_SING)?;
    let map = eta_heatmap(&trace, DEFAULT_TOL_SING)?;
    println!("eta = {:.6e}  heatmap min = {:.6e}", scan.eta, map.min());
    if let Some((tm, tf)) = scan.argmin_times(&grid) {
        println!("worst cell at t_m = {tm:.3}, t_f = {tf:.3}");
    }

    let n = grid.n_points();
    let cells: Vec<Vec<f64>> = (0..n)
        .map(|m| (0..n).map(|f| if f > m { map.get(m, f) } else { f64::NAN }).collect())
        .collect();
    let range = (grid.t_start(), grid.t_end());
    let out = std::env::temp_dir().join("fermibath_eta_heatmap.svg");
    std::fs::write(&out, svg::heatmap("eta(t_m, t_f)", "t_f", "t_m", range, range, &cells))?;
    println!("wrote {}", out.display());
    Ok(())
}
