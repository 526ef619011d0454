//! Decoherence factors as products over `k > 0` modes.
//!
//! For one qubit
//!
//! ```text
//! x(t) = e^{-i(E_e - E_g)t} Π_{k>0} [cos²α_k + sin²α_k e^{-2iε_e^k t}]
//! ```
//!
//! which is the configuration sum over excited pair sets factorized mode by
//! mode. Each factor has modulus at most one, so the running product never
//! overflows and stays accurate even when `|x|` becomes tiny.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising_env::TwoQubitSpectra;
use crate::paired_modes::ModeSpectrum;

/// Slack allowed on `|x| <= 1` before a value is treated as unphysical.
pub const MODULUS_SLACK: f64 = 1e-12;

/// Number of recurrence steps before a phasor is re-seeded from `exp`.
const RESEED_EVERY: usize = 256;

/// Uniform time grid `t_i = t_start + i Δt`, `i = 0..n_points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_start: f64,
    t_end: f64,
    n_points: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_points: usize) -> Result<Self> {
        if !(t_start.is_finite() && t_start >= 0.0) {
            return Err(Error::invalid("t_start", format!("must be finite and >= 0, got {t_start}")));
        }
        if !(t_end.is_finite() && t_end > t_start) {
            return Err(Error::invalid(
                "t_end",
                format!("must be finite and > t_start = {t_start}, got {t_end}"),
            ));
        }
        if n_points < 2 {
            return Err(Error::invalid("n_points", format!("must be >= 2, got {n_points}")));
        }
        Ok(TimeGrid {
            t_start,
            t_end,
            n_points,
        })
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        (self.t_end - self.t_start) / (self.n_points - 1) as f64
    }

    #[inline]
    pub fn time(&self, i: usize) -> f64 {
        self.t_start + i as f64 * self.spacing()
    }

    pub fn times(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.time(i))
    }
}

/// Sampled decoherence factor(s) on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceTrace {
    pub grid: TimeGrid,
    pub values: TraceValues,
    pub params_fingerprint: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceValues {
    /// `x(t_i)` for a single qubit.
    OneQubit(Vec<Complex64>),
    /// `x_{0,1}`, `x_{0,2}`, `x_{1,2}` for two qubits.
    TwoQubit([Vec<Complex64>; 3]),
}

/// Index pairs `(a, b)` of the three stored two-qubit overlaps.
pub const OVERLAP_PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

impl DecoherenceTrace {
    /// One-qubit factor, or `None` for a two-qubit trace.
    pub fn one_qubit(&self) -> Option<&[Complex64]> {
        match &self.values {
            TraceValues::OneQubit(x) => Some(x),
            TraceValues::TwoQubit(_) => None,
        }
    }

    pub fn two_qubit(&self) -> Option<&[Vec<Complex64>; 3]> {
        match &self.values {
            TraceValues::TwoQubit(x) => Some(x),
            TraceValues::OneQubit(_) => None,
        }
    }

    pub fn len(&self) -> usize {
        self.grid.n_points()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Loschmidt echo `|x|²` of a one-qubit trace.
    pub fn echo(&self) -> Option<Vec<f64>> {
        self.one_qubit()
            .map(|x| x.iter().map(|v| v.norm_sqr().min(1.0)).collect())
    }

    /// Builds a one-qubit trace from externally supplied samples.
    pub fn from_samples(grid: TimeGrid, x: Vec<Complex64>) -> Result<Self> {
        if x.len() != grid.n_points() {
            return Err(Error::invalid(
                "x",
                format!("{} samples for a {}-point grid", x.len(), grid.n_points()),
            ));
        }
        Ok(DecoherenceTrace {
            grid,
            values: TraceValues::OneQubit(x),
            params_fingerprint: 0,
        })
    }

    /// CSV rows `t,re_x,im_x,abs_x,echo` or the two-qubit analogue.
    pub fn to_csv(&self) -> String {
        use crate::output::fmt_f64 as f;
        let mut out = String::new();
        match &self.values {
            TraceValues::OneQubit(x) => {
                out.push_str("t,re_x,im_x,abs_x,echo\n");
                for (t, v) in self.grid.times().zip(x) {
                    out.push_str(&format!(
                        "{},{},{},{},{}\n",
                        f(t),
                        f(v.re),
                        f(v.im),
                        f(v.norm()),
                        f(v.norm_sqr())
                    ));
                }
            }
            TraceValues::TwoQubit(xs) => {
                out.push_str("t");
                for (a, b) in OVERLAP_PAIRS {
                    out.push_str(&format!(",re_x{a}{b},im_x{a}{b},abs_x{a}{b}"));
                }
                out.push('\n');
                for (i, t) in self.grid.times().enumerate() {
                    out.push_str(&f(t));
                    for x in xs {
                        let v = x[i];
                        out.push_str(&format!(",{},{},{}", f(v.re), f(v.im), f(v.norm())));
                    }
                    out.push('\n');
                }
            }
        }
        out
    }
}

/// `1 - e^{-iθ}` without cancellation for small `θ`.
#[inline]
fn one_minus_phase(theta: f64) -> Complex64 {
    let h = (0.5 * theta).sin();
    Complex64::new(2.0 * h * h, theta.sin())
}

/// Global phase `e^{-i(E_e - E_g)t}`.
#[inline]
fn global_phase(spec: &ModeSpectrum, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, -(spec.ground_energy_e() - spec.ground_energy_g()) * t)
}

/// `x(t) = ⟨φ_g(t)|φ_e(t)⟩` for a bath prepared in the ground state of `H_g`.
pub fn decoherence_factor(spec: &ModeSpectrum, t: f64) -> Complex64 {
    if t == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut prod = Complex64::new(1.0, 0.0);
    for m in spec.entries() {
        let s = m.alpha().sin();
        let s2 = s * s;
        // cos²α + sin²α e^{-iθ} = 1 - sin²α (1 - e^{-iθ})
        prod *= Complex64::new(1.0, 0.0) - s2 * one_minus_phase(2.0 * m.eps_e * t);
    }
    prod * global_phase(spec, t)
}

/// Loschmidt echo `|x(t)|²`.
pub fn loschmidt_echo(spec: &ModeSpectrum, t: f64) -> f64 {
    decoherence_factor(spec, t).norm_sqr().clamp(0.0, 1.0)
}

/// Two-qubit overlap `x_{a,b}(t) = ⟨φ_b(t)|φ_a(t)⟩`, bath started in `|G_0⟩`.
///
/// Per mode:
///
/// ```text
/// c0a c0b cab + [c0a s0b e^{2iε_b t} - c0b s0a e^{-2iε_a t}] sab
///             + s0a s0b cab e^{-2i(ε_a - ε_b)t}
/// ```
///
/// with `cXY = cos α_{X,Y}`, `sXY = sin α_{X,Y}`, times `e^{-i(E_a - E_b)t}`.
pub fn overlap_two_qubit(a: usize, b: usize, spectra: &TwoQubitSpectra, t: f64) -> Complex64 {
    assert!(a < 3 && b < 3, "branch indices must be 0, 1 or 2");
    if a == b || t == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut prod = Complex64::new(1.0, 0.0);
    for i in 0..spectra.n_modes() {
        let (s0a, c0a) = spectra.alpha_ab(0, a, i).sin_cos();
        let (s0b, c0b) = spectra.alpha_ab(0, b, i).sin_cos();
        let (sab, cab) = spectra.alpha_ab(a, b, i).sin_cos();
        let wa = 2.0 * spectra.eps(a, i) * t;
        let wb = 2.0 * spectra.eps(b, i) * t;
        let term = Complex64::new(c0a * c0b * cab, 0.0)
            + (c0a * s0b * Complex64::from_polar(1.0, wb)
                - c0b * s0a * Complex64::from_polar(1.0, -wa))
                * sab
            + s0a * s0b * cab * Complex64::from_polar(1.0, -(wa - wb));
        prod *= term;
    }
    let de = spectra.ground_energy(a) - spectra.ground_energy(b);
    prod * Complex64::from_polar(1.0, -de * t)
}

fn fingerprint<H: Hash>(tag: &str, grid: &TimeGrid, spectra: &[&ModeSpectrum], extra: H) -> u64 {
    let mut h = DefaultHasher::new();
    tag.hash(&mut h);
    grid.t_start.to_bits().hash(&mut h);
    grid.t_end.to_bits().hash(&mut h);
    grid.n_points.hash(&mut h);
    for s in spectra {
        s.lattice_size().hash(&mut h);
        for m in s.entries() {
            for v in [m.k, m.theta_g, m.theta_e, m.eps_g, m.eps_e] {
                v.to_bits().hash(&mut h);
            }
        }
    }
    extra.hash(&mut h);
    h.finish()
}

/// Fills `out` with `x(t_first + j Δt)` for `j = 0..out.len()`.
///
/// Mode-major: each mode's phasor `e^{-2iεt}` is advanced by a fixed rotation
/// and re-seeded from `exp` every [`RESEED_EVERY`] steps, so the per-sample
/// cost is a couple of complex multiplies instead of a `sin`/`cos` pair.
fn fill_chunk(spec: &ModeSpectrum, t_first: f64, dt: f64, out: &mut [Complex64]) {
    out.iter_mut().for_each(|v| *v = Complex64::new(1.0, 0.0));
    for m in spec.entries() {
        let s = m.alpha().sin();
        let s2 = s * s;
        if s2 == 0.0 {
            continue;
        }
        let omega = 2.0 * m.eps_e;
        let step = Complex64::from_polar(1.0, -omega * dt);
        for (block_idx, block) in out.chunks_mut(RESEED_EVERY).enumerate() {
            let j0 = block_idx * RESEED_EVERY;
            let t0 = t_first + j0 as f64 * dt;
            let mut phase = Complex64::from_polar(1.0, -omega * t0);
            for v in block.iter_mut() {
                *v *= Complex64::new(1.0 - s2, 0.0) + s2 * phase;
                phase *= step;
            }
        }
    }
    for (j, v) in out.iter_mut().enumerate() {
        let t = t_first + j as f64 * dt;
        if t == 0.0 {
            *v = Complex64::new(1.0, 0.0);
        } else {
            *v *= global_phase(spec, t);
        }
    }
}

/// Samples per parallel work item in [`trace_over_grid`].
const CHUNK: usize = 2048;

/// One-qubit trace `x(t_i)` over the grid.
///
/// Time chunks are independent, so the result does not depend on the number
/// of workers in the current rayon pool.
pub fn trace_over_grid(spec: &ModeSpectrum, grid: &TimeGrid) -> DecoherenceTrace {
    let n = grid.n_points();
    let dt = grid.spacing();
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    x.par_chunks_mut(CHUNK).enumerate().for_each(|(c, out)| {
        let first = c * CHUNK;
        // exact sample times at chunk starts keep chunks independent
        fill_chunk(spec, grid.time(first), dt, out);
    });
    DecoherenceTrace {
        grid: *grid,
        values: TraceValues::OneQubit(x),
        params_fingerprint: fingerprint("1q", grid, &[spec], ()),
    }
}

/// Two-qubit trace of the three overlaps over the grid.
pub fn trace_two_qubit(spectra: &TwoQubitSpectra, grid: &TimeGrid) -> DecoherenceTrace {
    let xs = OVERLAP_PAIRS.map(|(a, b)| {
        (0..grid.n_points())
            .into_par_iter()
            .map(|i| overlap_two_qubit(a, b, spectra, grid.time(i)))
            .collect::<Vec<_>>()
    });
    DecoherenceTrace {
        grid: *grid,
        values: TraceValues::TwoQubit(xs),
        params_fingerprint: fingerprint(
            "2q",
            grid,
            &[spectra.branch(0), spectra.branch(1), spectra.branch(2)],
            (),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising_env::{build_spectrum, build_two_qubit_spectra, IsingParams, TwoQubitParams};

    fn spec(l: usize, lam: f64, delta: f64) -> ModeSpectrum {
        build_spectrum(&IsingParams::new(l, lam, delta).unwrap()).unwrap()
    }

    #[test]
    fn grid_basics() {
        let g = TimeGrid::new(0.0, 1.0, 5).unwrap();
        assert_eq!(g.spacing(), 0.25);
        assert_eq!(g.times().collect::<Vec<_>>(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(TimeGrid::new(1.0, 1.0, 5).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 1).is_err());
        assert!(TimeGrid::new(-1.0, 1.0, 3).is_err());
    }

    #[test]
    fn factor_is_one_at_zero_time_and_zero_coupling() {
        let s = spec(10, 0.5, 0.5);
        assert_eq!(decoherence_factor(&s, 0.0), Complex64::new(1.0, 0.0));
        let flat = spec(10, 0.5, 0.0);
        for t in [0.3, 1.0, 17.0, 1e3] {
            assert_eq!(decoherence_factor(&flat, t), Complex64::new(1.0, 0.0));
            assert_eq!(loschmidt_echo(&flat, t), 1.0);
        }
    }

    #[test]
    fn two_point_flat_trace() {
        let flat = spec(4, 0.5, 0.0);
        let tr = trace_over_grid(&flat, &TimeGrid::new(0.0, 1.0, 2).unwrap());
        assert_eq!(tr.one_qubit().unwrap(), &[Complex64::new(1.0, 0.0); 2]);
    }

    #[test]
    fn grid_kernel_matches_point_evaluation() {
        let s = spec(64, 0.9, 0.1);
        let grid = TimeGrid::new(0.0, 40.0, 5000).unwrap();
        let tr = trace_over_grid(&s, &grid);
        let x = tr.one_qubit().unwrap();
        assert_eq!(x[0], Complex64::new(1.0, 0.0));
        let worst = grid
            .times()
            .zip(x)
            .map(|(t, v)| (decoherence_factor(&s, t) - v).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-12, "worst deviation {worst:e}");
    }

    #[test]
    fn two_qubit_trivial_overlaps() {
        let p = TwoQubitParams {
            lattice_size: 10,
            lambda: 0.8,
            delta1: 0.0,
            delta2: 0.0,
            j_s: 1.0,
            lambda_s: 0.3,
        };
        let s = build_two_qubit_spectra(&p).unwrap();
        for (a, b) in OVERLAP_PAIRS {
            for t in [0.1, 2.0, 50.0] {
                assert_eq!(overlap_two_qubit(a, b, &s, t), Complex64::new(1.0, 0.0));
            }
        }
        let p = TwoQubitParams { delta1: 0.2, delta2: 0.1, ..p };
        let s = build_two_qubit_spectra(&p).unwrap();
        for a in 0..3 {
            assert_eq!(overlap_two_qubit(a, a, &s, 3.3), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn two_qubit_reduces_to_one_qubit() {
        // x_{1,0} = ⟨φ_0|φ_1⟩ is the one-qubit factor; x_{0,1} is its conjugate
        let p = TwoQubitParams {
            lattice_size: 100,
            lambda: 0.8,
            delta1: 0.05,
            delta2: 0.3,
            j_s: 1.0,
            lambda_s: 0.3,
        };
        let s2 = build_two_qubit_spectra(&p).unwrap();
        let s1 = spec(100, 0.8, 0.05);
        for t in [0.5, 3.0, 17.0, 55.5] {
            let x = decoherence_factor(&s1, t);
            assert!((overlap_two_qubit(1, 0, &s2, t) - x).norm() < 1e-12);
            assert!((overlap_two_qubit(0, 1, &s2, t) - x.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn csv_layout() {
        let s = spec(4, 0.5, 0.2);
        let tr = trace_over_grid(&s, &TimeGrid::new(0.0, 1.0, 3).unwrap());
        let csv = tr.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,re_x,im_x,abs_x,echo");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1].split(',').count(), 5);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
        #[test]
        fn modulus_bounded(l in 1usize..40, lam in 0.0f64..2.0, delta in 0.0f64..1.0, t in 0.0f64..500.0) {
            let s = spec(2 * l, lam, delta);
            proptest::prop_assert!(decoherence_factor(&s, t).norm() <= 1.0 + MODULUS_SLACK);
        }

        #[test]
        fn two_qubit_modulus_bounded(l in 1usize..20, lam in 0.0f64..2.0, d1 in 0.0f64..1.0, d2 in 0.0f64..1.0, t in 0.0f64..200.0) {
            let p = TwoQubitParams { lattice_size: 2 * l, lambda: lam, delta1: d1, delta2: d2, j_s: 1.0, lambda_s: 0.0 };
            let s = build_two_qubit_spectra(&p).unwrap();
            for (a, b) in OVERLAP_PAIRS {
                proptest::prop_assert!(overlap_two_qubit(a, b, &s, t).norm() <= 1.0 + MODULUS_SLACK);
            }
        }

        #[test]
        fn single_mode_factor_is_periodic(lam in 0.1f64..2.0, delta in 0.01f64..1.0, t in 0.0f64..10.0) {
            // L = 2 has one mode; its factor repeats with period 2π/(2ε)
            let s = spec(2, lam, delta);
            let m = s.entries()[0];
            let period = std::f64::consts::PI / m.eps_e;
            let strip = |t: f64| decoherence_factor(&s, t) / global_phase(&s, t);
            proptest::prop_assert!((strip(t) - strip(t + period)).norm() < 1e-10);
        }
    }
}
