//! Superoperators, intermediate maps and Choi (dynamical) matrices of the
//! dephasing channels induced by the bath.
//!
//! Basis conventions, fixed so exported Choi matrices are reproducible:
//!
//! * one qubit: `(g, e)`; vectorized operators `vec(|a⟩⟨b|) = |a⟩⊗|b⟩` in
//!   the order `(gg, ge, eg, ee)`.
//! * two qubits: `(gg, ge, eg, ee)`; the 16×16 dynamical matrix has index
//!   `4m + μ` for `|m⟩⊗|μ⟩`.
//!
//! The dynamical matrix is the realignment `D^{mn}_{μν} = Φ^{mμ}_{nν}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitian::{eigh, CMatrix};
use crate::ising_env::SystemPhases;

/// Default singularity guard for `x(t_m)` in the intermediate map.
pub const DEFAULT_TOL_SING: f64 = 1e-12;

/// `|x|` beyond `1 + MAP_MODULUS_TOL` is rejected as unphysical.
pub const MAP_MODULUS_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// One-qubit dephasing superoperator with coherence factor `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Superoperator1Q {
    x: Complex64,
}

impl Superoperator1Q {
    pub fn x(&self) -> Complex64 {
        self.x
    }

    /// 4×4 matrix acting on `vec(ρ) = (ρ_gg, ρ_ge, ρ_eg, ρ_ee)`.
    pub fn matrix(&self) -> CMatrix {
        let diag = [ONE, self.x.conj(), self.x, ONE];
        CMatrix::from_fn(4, |r, c| if r == c { diag[r] } else { ZERO })
    }

    /// Applies the channel to a 2×2 density matrix `[[ρ_gg, ρ_ge], [ρ_eg, ρ_ee]]`.
    pub fn apply(&self, rho: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
        let m = self.matrix();
        let v = [rho[0][0], rho[0][1], rho[1][0], rho[1][1]];
        let out: Vec<Complex64> = (0..4)
            .map(|r| (0..4).map(|c| m[(r, c)] * v[c]).sum())
            .collect();
        [[out[0], out[1]], [out[2], out[3]]]
    }
}

/// Dephasing channel `Φ(t, 0)` for a decoherence factor `x`.
pub fn map_1q(x: Complex64) -> Result<Superoperator1Q> {
    if !(x.re.is_finite() && x.im.is_finite()) || x.norm() > 1.0 + MAP_MODULUS_TOL {
        return Err(Error::invalid(
            "x",
            format!("decoherence factor must satisfy |x| <= 1, got |x| = {}", x.norm()),
        ));
    }
    Ok(Superoperator1Q { x })
}

/// `y = x_f / x_m`, the coherence factor of `Φ(t_f, t_m) = Φ(t_f, 0) Φ(t_m, 0)^+`.
///
/// `t_m` is only used to label the error.
pub fn intermediate_ratio(x_f: Complex64, x_m: Complex64, tol_sing: f64, t_m: f64) -> Result<Complex64> {
    let modulus = x_m.norm();
    if modulus <= tol_sing {
        return Err(Error::SingularIntermediate {
            t_m,
            modulus,
            tol: tol_sing,
        });
    }
    Ok(x_f / x_m)
}

/// Realigns a superoperator matrix into its dynamical matrix.
///
/// `d` is the single-system dimension (`2` or `4`).
pub fn reshuffle(phi: &CMatrix, d: usize) -> CMatrix {
    assert_eq!(phi.dim(), d * d);
    // Φ[(m μ), (n ν)] -> D[(m n), (μ ν)]
    CMatrix::from_fn(d * d, |row, col| {
        let (m, n) = (row / d, row % d);
        let (mu, nu) = (col / d, col % d);
        phi[(m * d + mu, n * d + nu)]
    })
}

/// Hermitian dynamical matrix with cached ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct DynamicalMatrix {
    entries: CMatrix,
    eigenvalues: Vec<f64>,
}

impl DynamicalMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        let eigenvalues = eigh(&entries)?.values;
        Ok(DynamicalMatrix {
            entries,
            eigenvalues,
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// CSV of `row,col,re,im` triples (all entries, row-major).
    pub fn to_csv(&self) -> String {
        use crate::output::fmt_f64 as f;
        let mut out = String::from("row,col,re,im\n");
        let n = self.dim();
        for r in 0..n {
            for c in 0..n {
                let v = self.entries[(r, c)];
                out.push_str(&format!("{r},{c},{},{}\n", f(v.re), f(v.im)));
            }
        }
        out
    }
}

/// The one-qubit dynamical matrix with `1` in the corners and `y`, `y*`
/// off the anti-diagonal corners; spectrum `{0, 0, 1-|y|, 1+|y|}`.
pub fn dynamical_matrix_1q_entries(y: Complex64) -> CMatrix {
    let mut d = CMatrix::zeros(4);
    d[(0, 0)] = ONE;
    d[(3, 3)] = ONE;
    d[(3, 0)] = y;
    d[(0, 3)] = y.conj();
    d
}

pub fn dynamical_matrix_1q(y: Complex64) -> Result<DynamicalMatrix> {
    if !(y.re.is_finite() && y.im.is_finite()) {
        return Err(Error::invalid("y", "must be finite"));
    }
    DynamicalMatrix::new(dynamical_matrix_1q_entries(y))
}

/// Closed-form smallest eigenvalue of the one-qubit dynamical matrix.
#[inline]
pub fn min_eigenvalue_1q(y: Complex64) -> f64 {
    (1.0 - y.norm()).min(0.0)
}

/// Two-qubit basis labels.
pub const GG: usize = 0;
pub const GE: usize = 1;
pub const EG: usize = 2;
pub const EE: usize = 3;

/// Intermediate-map coefficients for the two-qubit dynamical matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitCoherences {
    pub y01: Complex64,
    pub y02: Complex64,
    pub y12: Complex64,
}

impl TwoQubitCoherences {
    pub fn identity() -> Self {
        TwoQubitCoherences {
            y01: ONE,
            y02: ONE,
            y12: ONE,
        }
    }
}

/// Assembles the 16×16 two-qubit dynamical matrix term by term.
///
/// `dt = t_f - t_m`; the system Hamiltonian only enters through the
/// unimodular factors `e^{±iφ dt}`.
pub fn dynamical_matrix_2q_entries(y: &TwoQubitCoherences, phases: &SystemPhases, dt: f64) -> CMatrix {
    let mut d = CMatrix::zeros(16);
    // |A⟩⟨B| ⊗ |C⟩⟨D| lands at (4A + C, 4B + D)
    let mut put = |a: usize, b: usize, c: usize, e: usize, v: Complex64| {
        d[(4 * a + c, 4 * b + e)] += v;
    };
    for s in [GG, GE, EG, EE] {
        put(s, s, s, s, ONE);
    }
    put(GE, EG, GE, EG, ONE);
    put(EG, GE, EG, GE, ONE);

    let ph = |rate: f64| Complex64::from_polar(1.0, rate * dt);

    let v = y.y02.conj() * ph(phases.minus);
    put(EE, EG, EE, EG, v);
    put(EE, GE, EE, GE, v);
    let v = y.y02 * ph(-phases.minus);
    put(EG, EE, EG, EE, v);
    put(GE, EE, GE, EE, v);

    let v = y.y12.conj() * ph(phases.plus);
    put(GG, EG, GG, EG, v);
    put(GG, GE, GG, GE, v);
    let v = y.y12 * ph(-phases.plus);
    put(EG, GG, EG, GG, v);
    put(GE, GG, GE, GG, v);

    put(EE, GG, EE, GG, y.y01.conj() * ph(-phases.zero));
    put(GG, EE, GG, EE, y.y01 * ph(phases.zero));
    d
}

pub fn dynamical_matrix_2q(y: &TwoQubitCoherences, phases: &SystemPhases, dt: f64) -> Result<DynamicalMatrix> {
    for v in [y.y01, y.y02, y.y12] {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::invalid("y", "two-qubit coherences must be finite"));
        }
    }
    if !dt.is_finite() {
        return Err(Error::invalid("dt", "must be finite"));
    }
    DynamicalMatrix::new(dynamical_matrix_2q_entries(y, phases, dt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::eigvals_hermitian;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_spectrum(got: &[f64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= tol, "got {got:?}, want {want:?}");
        }
    }

    #[test]
    fn identity_and_full_dephasing() {
        let rho = [[c(0.7, 0.0), c(0.1, -0.2)], [c(0.1, 0.2), c(0.3, 0.0)]];
        assert_eq!(map_1q(c(1.0, 0.0)).unwrap().apply(rho), rho);
        let out = map_1q(c(0.0, 0.0)).unwrap().apply(rho);
        assert_eq!(out, [[rho[0][0], c(0.0, 0.0)], [c(0.0, 0.0), rho[1][1]]]);
    }

    #[test]
    fn coherence_scaling_on_random_state() {
        let x = c(0.3, 0.4);
        // pure state (cos a, e^{ib} sin a)
        let (a, b) = (0.4_f64, 1.1_f64);
        let (cg, ce) = (c(a.cos(), 0.0), Complex64::from_polar(a.sin(), b));
        let rho = [
            [cg * cg.conj(), cg * ce.conj()],
            [ce * cg.conj(), ce * ce.conj()],
        ];
        let out = map_1q(x).unwrap().apply(rho);
        // hand-computed: ρ'_ge = x* ρ_ge, ρ'_eg = x ρ_eg
        assert!((out[0][1] - x.conj() * rho[0][1]).norm() < 1e-15);
        assert!((out[1][0] - x * rho[1][0]).norm() < 1e-15);
        assert!(((out[0][0] + out[1][1]) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((out[0][1] - out[1][0].conj()).norm() < 1e-15);
    }

    #[test]
    fn rejects_supercontractive_factor() {
        assert!(map_1q(c(1.0 + 1e-6, 0.0)).is_err());
        assert!(map_1q(c(1.0 + 1e-12, 0.0)).is_ok());
    }

    #[test]
    fn ratio_cases() {
        let x = c(0.3, -0.2);
        assert_eq!(intermediate_ratio(x, x, DEFAULT_TOL_SING, 1.0).unwrap(), c(1.0, 0.0));
        assert!((intermediate_ratio(c(0.8, 0.0), c(0.5, 0.0), DEFAULT_TOL_SING, 1.0).unwrap() - c(1.6, 0.0)).norm() < 1e-15);
        assert!(matches!(
            intermediate_ratio(c(0.8, 0.0), c(1e-15, 0.0), 1e-12, 2.5),
            Err(Error::SingularIntermediate { t_m, .. }) if t_m == 2.5
        ));
    }

    #[test]
    fn one_qubit_dynamical_matrix_spectra() {
        assert_spectrum(dynamical_matrix_1q(c(1.0, 0.0)).unwrap().eigenvalues(), &[0.0, 0.0, 0.0, 2.0], 1e-14);
        assert_spectrum(dynamical_matrix_1q(c(0.0, 0.0)).unwrap().eigenvalues(), &[0.0, 0.0, 1.0, 1.0], 1e-14);
        assert_spectrum(dynamical_matrix_1q(c(0.5, 0.0)).unwrap().eigenvalues(), &[0.0, 0.0, 0.5, 1.5], 1e-14);
        let d = dynamical_matrix_1q(c(0.0, 1.6)).unwrap();
        assert!((d.min_eigenvalue() + 0.6).abs() < 1e-14);
        assert_eq!(min_eigenvalue_1q(c(0.3, 0.0)), 0.0);
        assert_eq!(min_eigenvalue_1q(c(2.0, 0.0)), -1.0);
    }

    #[test]
    fn realigned_superoperator_is_the_printed_matrix() {
        let x = c(0.6, -0.3);
        let from_map = reshuffle(&map_1q(x).unwrap().matrix(), 2);
        assert_eq!(from_map, dynamical_matrix_1q_entries(x));
    }

    #[test]
    fn closed_form_min_eigenvalue_matches_solver() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..1000 {
            let y = Complex64::from_polar(rng.gen_range(0.0..3.0), rng.gen_range(-3.2..3.2));
            let ev = eigvals_hermitian(&dynamical_matrix_1q_entries(y)).unwrap();
            assert!((ev[0] - min_eigenvalue_1q(y)).abs() <= 1e-12);
            let want = [0.0, 0.0, 1.0 - y.norm(), 1.0 + y.norm()];
            let mut want = want.to_vec();
            want.sort_by(f64::total_cmp);
            assert_spectrum(&ev, &want, 1e-12);
        }
    }

    #[test]
    fn two_qubit_identity_map_is_psd() {
        let phases = SystemPhases::new(1.0, 0.5);
        let d = dynamical_matrix_2q(&TwoQubitCoherences::identity(), &phases, 0.0).unwrap();
        assert!(d.entries().hermiticity_residual() < 1e-15);
        assert!(d.min_eigenvalue().abs() < 1e-12);
        // the identity channel's Choi matrix is 4 |Ω⟩⟨Ω|
        assert!((d.eigenvalues()[15] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn two_qubit_spectrum_ignores_system_phases() {
        let y = TwoQubitCoherences {
            y01: c(0.9, 0.4),
            y02: c(-0.7, 0.8),
            y12: c(1.1, -0.2),
        };
        let a = dynamical_matrix_2q(&y, &SystemPhases::new(1.0, 0.5), 3.7).unwrap();
        let b = dynamical_matrix_2q(&y, &SystemPhases::new(2.0, 1.3), 3.7).unwrap();
        assert!(a.entries().hermiticity_residual() < 1e-15);
        assert_spectrum(a.eigenvalues(), b.eigenvalues(), 1e-10);
        assert!(a.min_eigenvalue() < 0.0);
    }

    #[test]
    fn choi_csv_has_all_entries() {
        let d = dynamical_matrix_1q(c(0.5, 0.5)).unwrap();
        let csv = d.to_csv();
        assert_eq!(csv.lines().count(), 17);
        assert!(csv.lines().any(|l| l.starts_with("3,0,")));
    }
}
