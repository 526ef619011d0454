//! Transverse-field Ising chain `H = -J Σ_j (σ^x_j σ^x_{j+1} + λ σ^z_j)` as a
//! paired-mode bath.
//!
//! The qubit couples through the field: in the excited branch the chain sees
//! `λ + δ`. Only the even-parity sector is modelled, which after the
//! Jordan-Wigner map is a free-fermion chain with anti-periodic momenta.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::paired_modes::{ModeEntry, ModeSpectrum};

/// Parameters of the one-qubit Ising bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsingParams {
    pub lattice_size: usize,
    pub lambda: f64,
    pub delta: f64,
    #[serde(default = "unit_coupling")]
    pub coupling_j: f64,
}

fn unit_coupling() -> f64 {
    1.0
}

fn check_common(lattice_size: usize, fields: &[(&'static str, f64)]) -> Result<()> {
    if lattice_size < 2 || lattice_size % 2 != 0 {
        return Err(Error::invalid(
            "L",
            format!("lattice size must be even and >= 2, got {lattice_size}"),
        ));
    }
    for &(name, v) in fields {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")));
        }
    }
    Ok(())
}

impl IsingParams {
    pub fn new(lattice_size: usize, lambda: f64, delta: f64) -> Result<Self> {
        let p = IsingParams {
            lattice_size,
            lambda,
            delta,
            coupling_j: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_common(
            self.lattice_size,
            &[("lambda", self.lambda), ("delta", self.delta)],
        )?;
        if !(self.coupling_j.is_finite() && self.coupling_j > 0.0) {
            return Err(Error::invalid(
                "coupling_j",
                format!("must be finite and > 0, got {}", self.coupling_j),
            ));
        }
        Ok(())
    }

    /// Field seen by the chain when the qubit is excited.
    pub fn lambda_eff(&self) -> f64 {
        self.lambda + self.delta
    }
}

/// Parameters of the two-qubit Ising bath (`δ_0 = 0` is implicit).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitParams {
    pub lattice_size: usize,
    pub lambda: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub j_s: f64,
    pub lambda_s: f64,
}

impl TwoQubitParams {
    pub fn validate(&self) -> Result<()> {
        check_common(
            self.lattice_size,
            &[
                ("lambda", self.lambda),
                ("delta1", self.delta1),
                ("delta2", self.delta2),
            ],
        )?;
        for (name, v) in [("j_s", self.j_s), ("lambda_s", self.lambda_s)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Coupling of branch `a`: `[0, δ_1, δ_2]`.
    pub fn delta(&self, a: usize) -> f64 {
        [0.0, self.delta1, self.delta2][a]
    }

    /// System phases `(φ+, φ-, φ0) = (2J_S(1+λ_S), 2J_S(1-λ_S), 4J_S λ_S)`.
    pub fn phases(&self) -> SystemPhases {
        SystemPhases::new(self.j_s, self.lambda_s)
    }
}

/// Phase rates contributed by the two-qubit system Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemPhases {
    pub plus: f64,
    pub minus: f64,
    pub zero: f64,
}

impl SystemPhases {
    pub fn new(j_s: f64, lambda_s: f64) -> Self {
        SystemPhases {
            plus: 2.0 * j_s * (1.0 + lambda_s),
            minus: 2.0 * j_s * (1.0 - lambda_s),
            zero: 4.0 * j_s * lambda_s,
        }
    }
}

/// Positive half of the anti-periodic grid: `k = (2π/L) q`, `q = 1/2, 3/2, …`.
pub fn momentum_grid(lattice_size: usize) -> Result<Vec<f64>> {
    if lattice_size < 2 || lattice_size % 2 != 0 {
        return Err(Error::invalid(
            "L",
            format!("lattice size must be even and >= 2, got {lattice_size}"),
        ));
    }
    let l = lattice_size as f64;
    Ok((0..lattice_size / 2)
        .map(|n| 2.0 * PI * (n as f64 + 0.5) / l)
        .collect())
}

/// Bogoliubov angle `atan2(-sin k, cos k - λ_eff)`.
#[inline]
pub fn bogoliubov_angle(k: f64, lambda_eff: f64) -> f64 {
    (-k.sin()).atan2(k.cos() - lambda_eff)
}

/// Dimensionless dispersion `sqrt(1 + λ² - 2λ cos k)`, nonnegative.
#[inline]
pub fn dispersion(k: f64, lambda_eff: f64) -> f64 {
    (1.0 + lambda_eff * lambda_eff - 2.0 * lambda_eff * k.cos())
        .max(0.0)
        .sqrt()
}

/// Quasiparticle energy of the spin chain, `2 J dispersion(k, λ_eff)`.
///
/// The factor of two is what the Jordan-Wigner map of `-J σ^x σ^x - Jλ σ^z`
/// produces; the dense-Hamiltonian oracle pins it.
#[inline]
pub fn quasiparticle_energy(k: f64, lambda_eff: f64, coupling_j: f64) -> f64 {
    2.0 * coupling_j * dispersion(k, lambda_eff)
}

fn spectrum_between(
    lattice_size: usize,
    lambda_g: f64,
    lambda_e: f64,
    coupling_j: f64,
) -> Result<ModeSpectrum> {
    let entries = momentum_grid(lattice_size)?
        .into_iter()
        .map(|k| {
            ModeEntry::new(
                k,
                bogoliubov_angle(k, lambda_g),
                bogoliubov_angle(k, lambda_e),
                quasiparticle_energy(k, lambda_g, coupling_j),
                quasiparticle_energy(k, lambda_e, coupling_j),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    ModeSpectrum::new(lattice_size, entries)
}

/// Mode table for `H_g = H_Ising(λ)` and `H_e = H_Ising(λ + δ)`.
pub fn build_spectrum(params: &IsingParams) -> Result<ModeSpectrum> {
    params.validate()?;
    spectrum_between(
        params.lattice_size,
        params.lambda,
        params.lambda_eff(),
        params.coupling_j,
    )
}

/// The three bath branches of the two-qubit problem.
///
/// Spectrum `a` pairs `H_0` (as the `g` side) with `H_a = H_Ising(λ + δ_a)`
/// (as the `e` side), so its per-mode `alpha` is `α_{0,a}` and its excited
/// ground energy is `E_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitSpectra {
    spectra: [ModeSpectrum; 3],
}

impl TwoQubitSpectra {
    pub fn new(spectra: [ModeSpectrum; 3]) -> Result<Self> {
        let size = spectra[0].lattice_size();
        if spectra.iter().any(|s| s.lattice_size() != size) {
            return Err(Error::invalid("spectra", "branches disagree on lattice size"));
        }
        Ok(TwoQubitSpectra { spectra })
    }

    pub fn branch(&self, a: usize) -> &ModeSpectrum {
        &self.spectra[a]
    }

    pub fn lattice_size(&self) -> usize {
        self.spectra[0].lattice_size()
    }

    pub fn n_modes(&self) -> usize {
        self.spectra[0].entries().len()
    }

    /// `θ_a^k` for mode index `i`.
    #[inline]
    pub fn theta(&self, a: usize, i: usize) -> f64 {
        self.spectra[a].entries()[i].theta_e
    }

    /// `ε_a^k` for mode index `i`.
    #[inline]
    pub fn eps(&self, a: usize, i: usize) -> f64 {
        self.spectra[a].entries()[i].eps_e
    }

    /// `α_{a,b}^k = (θ_a^k - θ_b^k) / 2`.
    #[inline]
    pub fn alpha_ab(&self, a: usize, b: usize, i: usize) -> f64 {
        (self.theta(a, i) - self.theta(b, i)) / 2.0
    }

    /// Ground energy `E_a` of branch `a`.
    pub fn ground_energy(&self, a: usize) -> f64 {
        self.spectra[a].ground_energy_e()
    }

    pub fn max_eps(&self) -> f64 {
        self.spectra.iter().map(ModeSpectrum::max_eps_e).fold(0.0, f64::max)
    }
}

pub fn build_two_qubit_spectra(params: &TwoQubitParams) -> Result<TwoQubitSpectra> {
    params.validate()?;
    let mk = |a: usize| {
        spectrum_between(
            params.lattice_size,
            params.lambda,
            params.lambda + params.delta(a),
            1.0,
        )
    };
    TwoQubitSpectra::new([mk(0)?, mk(1)?, mk(2)?])
}
