//! Paired-mode (k, -k) description of quadratic fermionic Hamiltonians.
//!
//! A bath Hamiltonian and its perturbed partner are both diagonal in
//! Bogoliubov quasiparticles that mix `a_k` with `a†_{-k}`. Everything the
//! decoherence channel needs is the pair of mixing angles and the pair of
//! quasiparticle energies per momentum `k > 0`; the `-k` partner is implied.

use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};
use crate::output::fmt_f64;

/// One `k > 0` momentum mode of an unperturbed/perturbed Hamiltonian pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeEntry {
    pub k: f64,
    pub theta_g: f64,
    pub theta_e: f64,
    pub eps_g: f64,
    pub eps_e: f64,
}

impl ModeEntry {
    pub fn new(k: f64, theta_g: f64, theta_e: f64, eps_g: f64, eps_e: f64) -> Result<Self> {
        for (field, v) in [
            ("k", k),
            ("theta_g", theta_g),
            ("theta_e", theta_e),
            ("eps_g", eps_g),
            ("eps_e", eps_e),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(field, format!("must be finite, got {v}")));
            }
        }
        if !(k > 0.0 && k < std::f64::consts::PI) {
            return Err(Error::invalid("k", format!("must lie in (0, pi), got {k}")));
        }
        if eps_g < 0.0 {
            return Err(Error::invalid("eps_g", format!("must be >= 0, got {eps_g}")));
        }
        if eps_e < 0.0 {
            return Err(Error::invalid("eps_e", format!("must be >= 0, got {eps_e}")));
        }
        Ok(ModeEntry {
            k,
            theta_g,
            theta_e,
            eps_g,
            eps_e,
        })
    }

    /// Half the difference of the Bogoliubov angles.
    #[inline]
    pub fn alpha(&self) -> f64 {
        alpha(self.theta_g, self.theta_e)
    }
}

/// `(theta_g - theta_e) / 2`, the rotation linking the two quasiparticle bases.
#[inline]
pub fn alpha(theta_g: f64, theta_e: f64) -> f64 {
    (theta_g - theta_e) / 2.0
}

/// Ground-state energy `-(1/2) Σ ε` of `H = Σ_k ε_k (A†_k A_k - 1/2)`.
///
/// `energies` must list every momentum, both members of each `±k` pair.
pub fn ground_energy(energies: &[f64]) -> Result<f64> {
    if energies.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    if let Some(&e) = energies.iter().find(|e| !(**e >= 0.0) || !e.is_finite()) {
        return Err(Error::invalid("energies", format!("must be finite and >= 0, got {e}")));
    }
    Ok(-0.5 * energies.iter().sum::<f64>())
}

/// Paired-mode spectrum for the `k > 0` half of an even-sector momentum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    entries: Vec<ModeEntry>,
    lattice_size: usize,
    ground_energy_g: f64,
    ground_energy_e: f64,
}

impl ModeSpectrum {
    /// Builds a spectrum and derives both ground energies from the mode table.
    ///
    /// `entries` must hold exactly `lattice_size / 2` modes in ascending `k`.
    pub fn new(lattice_size: usize, entries: Vec<ModeEntry>) -> Result<Self> {
        if lattice_size < 2 || lattice_size % 2 != 0 {
            return Err(Error::invalid(
                "lattice_size",
                format!("must be even and >= 2, got {lattice_size}"),
            ));
        }
        if entries.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        if entries.len() != lattice_size / 2 {
            return Err(Error::invalid(
                "entries",
                format!(
                    "expected {} modes for L = {lattice_size}, got {}",
                    lattice_size / 2,
                    entries.len()
                ),
            ));
        }
        if entries.windows(2).any(|w| !(w[0].k < w[1].k)) {
            return Err(Error::invalid("entries", "momenta must be strictly ascending"));
        }
        // each stored mode stands for itself and its -k partner
        let doubled = |f: fn(&ModeEntry) -> f64| -> Vec<f64> {
            entries.iter().flat_map(|m| [f(m), f(m)]).collect()
        };
        let ground_energy_g = ground_energy(&doubled(|m| m.eps_g))?;
        let ground_energy_e = ground_energy(&doubled(|m| m.eps_e))?;
        Ok(ModeSpectrum {
            entries,
            lattice_size,
            ground_energy_g,
            ground_energy_e,
        })
    }

    pub fn entries(&self) -> &[ModeEntry] {
        &self.entries
    }

    pub fn lattice_size(&self) -> usize {
        self.lattice_size
    }

    pub fn ground_energy_g(&self) -> f64 {
        self.ground_energy_g
    }

    pub fn ground_energy_e(&self) -> f64 {
        self.ground_energy_e
    }

    pub fn alphas(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(ModeEntry::alpha)
    }

    /// Largest perturbed quasiparticle energy; sets the fastest oscillation.
    pub fn max_eps_e(&self) -> f64 {
        self.entries.iter().map(|m| m.eps_e).fold(0.0, f64::max)
    }

    /// Reads a `k,theta_g,theta_e,eps_g,eps_e` table, one row per `k > 0` mode.
    ///
    /// Lines starting with `#` are ignored. The lattice size is inferred as
    /// twice the number of rows.
    pub fn from_csv_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut entries = Vec::new();
        let mut saw_header = false;
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::SpectrumFormat {
                line: lineno,
                reason: e.to_string(),
            })?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !saw_header {
                let cols: Vec<&str> = line.split(',').map(str::trim).collect();
                if cols != ["k", "theta_g", "theta_e", "eps_g", "eps_e"] {
                    return Err(Error::SpectrumFormat {
                        line: lineno,
                        reason: format!("expected header `k,theta_g,theta_e,eps_g,eps_e`, got `{line}`"),
                    });
                }
                saw_header = true;
                continue;
            }
            let fields: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::SpectrumFormat {
                    line: lineno,
                    reason: e.to_string(),
                })?;
            if fields.len() != 5 {
                return Err(Error::SpectrumFormat {
                    line: lineno,
                    reason: format!("expected 5 columns, got {}", fields.len()),
                });
            }
            let entry = ModeEntry::new(fields[0], fields[1], fields[2], fields[3], fields[4])
                .map_err(|e| Error::SpectrumFormat {
                    line: lineno,
                    reason: e.to_string(),
                })?;
            entries.push(entry);
        }
        if !saw_header {
            return Err(Error::SpectrumFormat {
                line: 0,
                reason: "missing header".into(),
            });
        }
        let size = 2 * entries.len();
        ModeSpectrum::new(size, entries)
    }

    /// Writes the table read by [`ModeSpectrum::from_csv_reader`].
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,theta_g,theta_e,eps_g,eps_e\n");
        for m in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_f64(m.k),
                fmt_f64(m.theta_g),
                fmt_f64(m.theta_e),
                fmt_f64(m.eps_g),
                fmt_f64(m.eps_e)
            ));
        }
        out
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::from_csv_reader(std::io::BufReader::new(file))
    }
}
