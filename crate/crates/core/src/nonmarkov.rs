//! Non-Markovianity quantifiers built on a decoherence trace.
//!
//! * `η`: the most negative eigenvalue of the intermediate dynamical matrix
//!   `D[Φ(t_f, t_m)]` over all grid pairs `t_m < t_f`.
//! * revival statistics of the Loschmidt echo (`ℒ_dec`, `ℒ_rev`, `τ`).
//! * the negativity `E_SA(t)` of the qubit entangled with an idle ancilla,
//!   and the witness `𝒩`, the accumulated growth of `E_SA`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel_maps::{
    dynamical_matrix_2q_entries, map_1q, min_eigenvalue_1q, TwoQubitCoherences,
};
use crate::echo_engine::{DecoherenceTrace, TimeGrid};
use crate::error::{Error, Result};
use crate::hermitian::{eigh, CMatrix};
use crate::ising_env::SystemPhases;
use crate::output::fmt_f64;

/// Result of the one-qubit `η` scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaScan {
    /// `η <= 0`; zero when every intermediate map is CP on the grid.
    pub eta: f64,
    /// Grid indices `(m, f)` of the most negative cell, `m < f`.
    pub argmin: Option<(usize, usize)>,
    /// Number of `t_m` points skipped because `|x(t_m)| <= tol_sing`.
    pub skipped_cells: usize,
}

impl EtaScan {
    pub fn argmin_times(&self, grid: &TimeGrid) -> Option<(f64, f64)> {
        self.argmin.map(|(m, f)| (grid.time(m), grid.time(f)))
    }
}

fn one_qubit_values(trace: &DecoherenceTrace) -> Result<&[Complex64]> {
    let x = trace
        .one_qubit()
        .ok_or_else(|| Error::invalid("trace", "expected a one-qubit trace"))?;
    if x.is_empty() {
        return Err(Error::EmptyTrace);
    }
    Ok(x)
}

/// `η = min_{m<f} min(0, 1 - |x_f| / |x_m|)` in a single backward pass.
///
/// For fixed `t_m` the worst `t_f` is the largest `|x|` later in the trace,
/// so a running suffix maximum turns the pair scan into `O(T)`. Ties resolve
/// to the earliest `t_m`, then the earliest `t_f`.
pub fn eta(trace: &DecoherenceTrace, tol_sing: f64) -> Result<EtaScan> {
    let x = one_qubit_values(trace)?;
    let r: Vec<f64> = x.iter().map(|v| v.norm()).collect();
    let n = r.len();

    // suffix_arg[i] = earliest index j > i maximising r[j]
    let mut suffix_arg = vec![usize::MAX; n];
    let mut best_j = usize::MAX;
    for i in (0..n.saturating_sub(1)).rev() {
        let j = i + 1;
        if best_j == usize::MAX || r[j] >= r[best_j] {
            best_j = j;
        }
        suffix_arg[i] = best_j;
    }

    let mut out = EtaScan {
        eta: 0.0,
        argmin: None,
        skipped_cells: 0,
    };
    for m in 0..n.saturating_sub(1) {
        if r[m] <= tol_sing {
            out.skipped_cells += 1;
            continue;
        }
        let f = suffix_arg[m];
        let val = 1.0 - r[f] / r[m];
        if val < out.eta {
            out.eta = val;
            out.argmin = Some((m, f));
        }
    }
    Ok(out)
}

/// Smallest eigenvalue of `D[Φ(t_f, t_m)]` on every grid cell.
#[derive(Debug, Clone)]
pub struct Heatmap {
    pub grid: TimeGrid,
    /// Row-major `n × n`, indexed `[m * n + f]`; NaN where `f <= m` or the
    /// cell is singular.
    pub cells: Vec<f64>,
}

impl Heatmap {
    pub fn get(&self, m: usize, f: usize) -> f64 {
        self.cells[m * self.grid.n_points() + f]
    }

    /// Minimum over the defined cells (0 if none are defined).
    pub fn min(&self) -> f64 {
        self.cells
            .iter()
            .filter(|v| !v.is_nan())
            .fold(0.0, |a, &b| a.min(b))
    }

    /// Dense matrix CSV: a `t_m\t_f` header row of `t_f` values, then one row
    /// per `t_m`. Undefined cells are written as `nan`.
    pub fn to_csv(&self) -> String {
        let n = self.grid.n_points();
        let mut out = String::from("t_m\\t_f");
        for f in 0..n {
            out.push(',');
            out.push_str(&fmt_f64(self.grid.time(f)));
        }
        out.push('\n');
        for m in 0..n {
            out.push_str(&fmt_f64(self.grid.time(m)));
            for f in 0..n {
                out.push(',');
                out.push_str(&fmt_f64(self.get(m, f)));
            }
            out.push('\n');
        }
        out
    }
}

/// One-qubit `(t_m, t_f)` map of `min(0, 1 - |y|)`.
pub fn eta_heatmap(trace: &DecoherenceTrace, tol_sing: f64) -> Result<Heatmap> {
    let x = one_qubit_values(trace)?;
    let n = x.len();
    let mut cells = vec![f64::NAN; n * n];
    cells.par_chunks_mut(n).enumerate().for_each(|(m, row)| {
        let xm = x[m].norm();
        if xm <= tol_sing {
            return;
        }
        for f in (m + 1)..n {
            row[f] = min_eigenvalue_1q(Complex64::new(x[f].norm() / xm, 0.0));
        }
    });
    Ok(Heatmap {
        grid: trace.grid,
        cells,
    })
}

/// Result of the two-qubit `η` scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaTwoQubit {
    pub eta: f64,
    pub argmin: Option<(usize, usize)>,
    /// `t_m` points where any of the three overlaps is singular.
    pub skipped_cells: usize,
}

fn two_qubit_values(trace: &DecoherenceTrace) -> Result<&[Vec<Complex64>; 3]> {
    let xs = trace
        .two_qubit()
        .ok_or_else(|| Error::invalid("trace", "expected a two-qubit trace"))?;
    if xs[0].is_empty() {
        return Err(Error::EmptyTrace);
    }
    Ok(xs)
}

/// Coherences `y_{a,b} = x_{a,b}(t_f) / x_{a,b}(t_m)`, or `None` if singular.
fn coherences_at(xs: &[Vec<Complex64>; 3], m: usize, f: usize, tol_sing: f64) -> Option<TwoQubitCoherences> {
    let y = |k: usize| {
        let xm = xs[k][m];
        (xm.norm() > tol_sing).then(|| xs[k][f] / xm)
    };
    Some(TwoQubitCoherences {
        y01: y(0)?,
        y02: y(1)?,
        y12: y(2)?,
    })
}

/// Full ascending spectrum of the two-qubit intermediate dynamical matrix on
/// cell `(m, f)`; `None` if the cell is singular.
pub fn two_qubit_cell_spectrum(
    trace: &DecoherenceTrace,
    phases: &SystemPhases,
    m: usize,
    f: usize,
    tol_sing: f64,
) -> Result<Option<Vec<f64>>> {
    let xs = two_qubit_values(trace)?;
    let Some(y) = coherences_at(xs, m, f, tol_sing) else {
        return Ok(None);
    };
    let dt = trace.grid.time(f) - trace.grid.time(m);
    Ok(Some(eigh(&dynamical_matrix_2q_entries(&y, phases, dt))?.values))
}

/// Exhaustive pair scan of the smallest two-qubit eigenvalue.
///
/// There is no monotone shortcut here, so the cost is `O(T²)` dense 16×16
/// eigensolves; keep the grid modest.
pub fn eta_two_qubit(trace: &DecoherenceTrace, phases: &SystemPhases, tol_sing: f64) -> Result<EtaTwoQubit> {
    let xs = two_qubit_values(trace)?;
    let n = xs[0].len();
    let grid = trace.grid;
    let skipped_cells = (0..n.saturating_sub(1))
        .filter(|&m| xs.iter().any(|x| x[m].norm() <= tol_sing))
        .count();

    let rows: Vec<Result<Option<(f64, usize)>>> = (0..n.saturating_sub(1))
        .into_par_iter()
        .map(|m| {
            let mut best: Option<(f64, usize)> = None;
            for f in (m + 1)..n {
                let Some(y) = coherences_at(xs, m, f, tol_sing) else {
                    return Ok(None);
                };
                let dt = grid.time(f) - grid.time(m);
                let d = dynamical_matrix_2q_entries(&y, phases, dt);
                let lo = eigh(&d)?.values[0];
                if best.map_or(true, |(b, _)| lo < b) {
                    best = Some((lo, f));
                }
            }
            Ok(best)
        })
        .collect();

    let mut out = EtaTwoQubit {
        eta: 0.0,
        argmin: None,
        skipped_cells,
    };
    for (m, row) in rows.into_iter().enumerate() {
        if let Some((lo, f)) = row? {
            if lo < out.eta {
                out.eta = lo;
                out.argmin = Some((m, f));
            }
        }
    }
    Ok(out)
}

/// Decay/revival summary of the Loschmidt echo.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalStats {
    /// Global minimum of `ℒ`.
    pub l_dec: f64,
    /// Largest `ℒ` after the global minimum.
    pub l_rev: f64,
    /// Time of `ℒ_rev`.
    pub tau: f64,
    pub t_dec: f64,
}

impl RevivalStats {
    /// `1 - sqrt(ℒ_rev / ℒ_dec)`, the `η` implied by a single dip and revival.
    pub fn implied_eta(&self) -> f64 {
        (1.0 - (self.l_rev / self.l_dec).sqrt()).min(0.0)
    }
}

/// Revival statistics from echo samples on `grid`.
///
/// The global minimum is taken at its last occurrence, so a flat echo has
/// nothing after it and reports [`Error::NoRevival`].
pub fn revival_stats_from_echo(grid: &TimeGrid, echo: &[f64]) -> Result<RevivalStats> {
    if echo.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let (i_min, &l_dec) = echo
        .iter()
        .enumerate()
        .fold(None, |acc: Option<(usize, &f64)>, (i, v)| match acc {
            Some((_, best)) if *best < *v => acc,
            _ => Some((i, v)),
        })
        .expect("non-empty");
    if i_min + 1 == echo.len() {
        return Err(Error::NoRevival {
            t_min: grid.time(i_min),
        });
    }
    let (i_rev, &l_rev) = echo[i_min + 1..]
        .iter()
        .enumerate()
        .fold(None, |acc: Option<(usize, &f64)>, (i, v)| match acc {
            Some((_, best)) if *best >= *v => acc,
            _ => Some((i, v)),
        })
        .expect("non-empty tail");
    Ok(RevivalStats {
        l_dec,
        l_rev,
        tau: grid.time(i_min + 1 + i_rev),
        t_dec: grid.time(i_min),
    })
}

pub fn revival_stats(trace: &DecoherenceTrace) -> Result<RevivalStats> {
    let echo = trace
        .echo()
        .ok_or_else(|| Error::invalid("trace", "expected a one-qubit trace"))?;
    revival_stats_from_echo(&trace.grid, &echo)
}

/// `ρ_SA = (Φ ⊗ I)[|φ+⟩⟨φ+|]` for the dephasing channel with factor `x`,
/// in the basis `|s a⟩`, `(gg, ge, eg, ee)`.
pub fn system_ancilla_state(x: Complex64) -> Result<CMatrix> {
    let map = map_1q(x)?;
    let mut rho = CMatrix::zeros(4);
    let zero = Complex64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            // Φ(|i⟩⟨j|) ⊗ |i⟩⟨j| / 2
            let mut unit = [[zero; 2]; 2];
            unit[i][j] = Complex64::new(1.0, 0.0);
            let img = map.apply(unit);
            for s in 0..2 {
                for t in 0..2 {
                    rho[(2 * s + i, 2 * t + j)] += 0.5 * img[s][t];
                }
            }
        }
    }
    Ok(rho)
}

/// Partial transpose on the ancilla factor of a two-qubit operator.
pub fn partial_transpose_ancilla(rho: &CMatrix) -> CMatrix {
    assert_eq!(rho.dim(), 4);
    CMatrix::from_fn(4, |r, c| {
        let (s, a) = (r / 2, r % 2);
        let (t, b) = (c / 2, c % 2);
        rho[(2 * s + b, 2 * t + a)]
    })
}

/// Negativity `Σ_i (|p_i| - p_i)` over the eigenvalues of `ρ^Γ`.
pub fn negativity_of_state(rho: &CMatrix) -> Result<f64> {
    let ev = eigh(&partial_transpose_ancilla(rho))?.values;
    Ok(ev.iter().map(|p| p.abs() - p).sum())
}

/// Qubit-ancilla negativity, `E_SA = |x|`.
#[inline]
pub fn negativity(x: Complex64) -> f64 {
    x.norm()
}

/// `E_SA(t)` along a one-qubit trace, equal to `sqrt(ℒ(t))`.
pub fn negativity_trace(trace: &DecoherenceTrace) -> Result<Vec<f64>> {
    Ok(one_qubit_values(trace)?.iter().map(|&x| negativity(x)).collect())
}

/// `𝒩`: the sum of all positive increments of `entanglement`.
pub fn witness_n(entanglement: &[f64]) -> f64 {
    entanglement
        .windows(2)
        .map(|w| (w[1] - w[0]).max(0.0))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub index: usize,
    pub kind: ExtremumKind,
    pub value: f64,
}

/// Interior local extrema by strict comparison with the neighbouring
/// plateaus; a plateau is reported at its first point.
pub fn local_extrema(seq: &[f64]) -> Vec<Extremum> {
    // collapse runs of equal values to (first index, value)
    let mut runs: Vec<(usize, f64)> = Vec::new();
    for (i, &v) in seq.iter().enumerate() {
        if runs.last().map_or(true, |&(_, last)| last != v) {
            runs.push((i, v));
        }
    }
    runs.windows(3)
        .filter_map(|w| {
            let (prev, (index, value), next) = (w[0].1, w[1], w[2].1);
            if value > prev && value > next {
                Some(Extremum { index, kind: ExtremumKind::Max, value })
            } else if value < prev && value < next {
                Some(Extremum { index, kind: ExtremumKind::Min, value })
            } else {
                None
            }
        })
        .collect()
}

/// Time before which a chain of `L` sites behaves as if infinite.
///
/// Quasiparticles of `ε_k = 2J sqrt(1 + λ² - 2λ cos k)` move at most at
/// `v = 2J min(λ, 1)`; half a lap around the ring takes `L / (2v)`. At
/// `λ = 1` this is `τ / 2`.
pub fn finite_size_window(lattice_size: usize, lambda_eff: f64, coupling_j: f64) -> f64 {
    let v = 2.0 * coupling_j * lambda_eff.min(1.0);
    if v <= 0.0 {
        return f64::INFINITY;
    }
    lattice_size as f64 / (2.0 * v)
}

/// Everything the one-qubit tools report for a single parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct NonMarkovReport {
    pub eta: f64,
    pub argmin_tm: Option<f64>,
    pub argmin_tf: Option<f64>,
    pub skipped_cells: usize,
    pub revival: Option<RevivalStats>,
    pub witness_n: f64,
}

impl NonMarkovReport {
    /// Builds the report; the witness is accumulated on `t <= window_end`.
    pub fn from_trace(trace: &DecoherenceTrace, tol_sing: f64, window_end: f64) -> Result<Self> {
        let scan = eta(trace, tol_sing)?;
        let revival = match revival_stats(trace) {
            Ok(r) => Some(r),
            Err(Error::NoRevival { .. }) => None,
            Err(e) => return Err(e),
        };
        let ent = negativity_trace(trace)?;
        let cut = trace.grid.times().take_while(|&t| t <= window_end).count();
        let times = scan.argmin_times(&trace.grid);
        Ok(NonMarkovReport {
            eta: scan.eta,
            argmin_tm: times.map(|t| t.0),
            argmin_tf: times.map(|t| t.1),
            skipped_cells: scan.skipped_cells,
            revival,
            witness_n: witness_n(&ent[..cut]),
        })
    }

    pub const CSV_HEADER: &'static str =
        "eta,tm_star,tf_star,skipped,l_dec,l_rev,tau,eta_from_echo,witness_n";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), fmt_f64);
        let r = self.revival;
        format!(
            "{},{},{},{},{},{},{},{},{}",
            fmt_f64(self.eta),
            opt(self.argmin_tm),
            opt(self.argmin_tf),
            self.skipped_cells,
            opt(r.map(|r| r.l_dec)),
            opt(r.map(|r| r.l_rev)),
            opt(r.map(|r| r.tau)),
            opt(r.map(|r| r.implied_eta())),
            fmt_f64(self.witness_n),
        )
    }
}
