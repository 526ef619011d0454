//! Round-trips a mode table through CSV and runs the channel on it.
//! Any bath with the (k, -k) pairing can be fed in this way.

use fermibath::channel_maps::DEFAULT_TOL_SING;
use fermibath::echo_engine::{trace_over_grid, TimeGrid};
use fermibath::ising_env::{build_spectrum, IsingParams};
use fermibath::nonmarkov::eta;
use fermibath::paired_modes::ModeSpectrum;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = build_spectrum(&IsingParams::new(64, 0.6, 0.3)?)?;
    let path = std::env::temp_dir().join("fermibath_modes.csv");
    std::fs::write(&path, spec.to_csv())?;

    let loaded = ModeSpectrum::from_csv_path(&path)?;
    println!("read {} modes for L = {}", loaded.entries().len(), loaded.lattice_size());
    let grid = TimeGrid::new(0.0, 50.0, 500)?;
    let a = eta(&trace_over_grid(&spec, &grid), DEFAULT_TOL_SING)?;
    let b = eta(&trace_over_grid(&loaded, &grid), DEFAULT_TOL_SING)?;
    println!("eta built = {:.10e}  eta loaded = {:.10e}", a.eta, b.eta);
    Ok(())
}
