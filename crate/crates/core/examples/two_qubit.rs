//! Two qubits in one bath: overlaps, echo and the two-qubit eta.
//! The system coupling only adds phases, so eta does not depend on it.

use fermibath::channel_maps::DEFAULT_TOL_SING;
use fermibath::echo_engine::{trace_two_qubit, TimeGrid};
use fermibath::ising_env::{build_two_qubit_spectra, TwoQubitParams};
use fermibath::nonmarkov::eta_two_qubit;

fn main() -> fermibath::Result<()> {
    let grid = TimeGrid::new(0.0, 30.0, 150)?;
    for (j_s, lambda_s) in [(0.0, 0.0), (1.0, 0.0), (0.7, 1.3)] {
        let params = TwoQubitParams {
            lattice_size: 12,
            lambda: 0.5,
            delta1: 0.1,
            delta2: 0.3,
            j_s,
            lambda_s,
        };
        let spectra = build_two_qubit_spectra(&params)?;
        let trace = trace_two_qubit(&spectra, &grid);
        let r = eta_two_qubit(&trace, &params.phases(), DEFAULT_TOL_SING)?;
        println!("J_S = {j_s:.1} lambda_S = {lambda_s:.1}: eta = {:.8e} at {:?}", r.eta, r.argmin);
    }
    Ok(())
}
