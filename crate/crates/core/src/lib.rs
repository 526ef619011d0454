//! Exact decoherence channels for qubits coupled to quadratic fermionic baths.
//!
//! A qubit (or a pair of qubits) dephases through its coupling to a
//! free-fermion environment. Because the bath Hamiltonians are quadratic and
//! share the `(k, -k)` pairing structure, the channel is fixed entirely by a
//! product over momentum modes. This crate builds that channel, its Choi
//! matrix and intermediate maps, and the non-Markovianity quantifiers derived
//! from them, specialised to the transverse-field Ising chain.
//!
//! Module map:
//!
//! * [`paired_modes`]: per-mode Bogoliubov angles and energies.
//! * [`ising_env`]: Ising-chain spectra for one and two qubits.
//! * [`echo_engine`]: decoherence factors, overlaps and traces.
//! * [`channel_maps`]: superoperators and dynamical matrices.
//! * [`nonmarkov`]: `η`, revival statistics, negativity, witness `𝒩`.
//! * [`oracle`]: dense exact diagonalization for small chains.
//! * [`scaling`]: size/field sweeps and exponential fits.
//! * [`cli`]: the `fermibath` command-line front end.
//! * [`svg`]: standalone SVG line charts and heatmaps.

pub mod channel_maps;
pub mod cli;
pub mod echo_engine;
pub mod error;
pub mod hermitian;
pub mod ising_env;
pub mod nonmarkov;
pub mod oracle;
pub mod output;
pub mod paired_modes;
pub mod scaling;
pub mod svg;

pub use error::{Error, Result};
