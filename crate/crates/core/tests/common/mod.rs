//! Brute-force references shared by the integration tests. Nothing here calls
//! into the closed forms it is used to check.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// Exhaustive `O(T²)` pair scan of `min(0, 1 - |x_f| / |x_m|)`.
/// Ties keep the earliest `t_m`, then the earliest `t_f`.
pub fn brute_force_eta(x: &[C64], tol_sing: f64) -> (f64, Option<(usize, usize)>, usize) {
    let r: Vec<f64> = x.iter().map(|v| v.norm()).collect();
    let mut eta = 0.0;
    let mut arg = None;
    let mut skipped = 0;
    for m in 0..r.len().saturating_sub(1) {
        if r[m] <= tol_sing {
            skipped += 1;
            continue;
        }
        for f in (m + 1)..r.len() {
            let v = 1.0 - r[f] / r[m];
            if v < eta {
                eta = v;
                arg = Some((m, f));
            }
        }
    }
    (eta, arg, skipped)
}

pub fn hermitian_eigenvalues(m: DMatrix<C64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Choi matrix `Σ_ij Φ(|i⟩⟨j|) ⊗ |i⟩⟨j|` of a dephasing channel that
/// multiplies `ρ_ij` by `c[i][j]`.
pub fn dephasing_choi(c: &[Vec<C64>]) -> DMatrix<C64> {
    let d = c.len();
    let mut m = DMatrix::from_element(d * d, d * d, C64::new(0.0, 0.0));
    for i in 0..d {
        for j in 0..d {
            m[(i * d + i, j * d + j)] = c[i][j];
        }
    }
    m
}

/// Spectrum of the one-qubit Choi matrix for coherence factor `y`
/// (`ρ_ge → y* ρ_ge`, `ρ_eg → y ρ_eg`).
pub fn choi_eigenvalues_1q(y: C64) -> Vec<f64> {
    let one = C64::new(1.0, 0.0);
    hermitian_eigenvalues(dephasing_choi(&[vec![one, y.conj()], vec![y, one]]))
}

/// Environment branch driven by each two-qubit basis state, in the order
/// `(gg, ge, eg, ee)`.
pub const BRANCH_OF: [usize; 4] = [1, 2, 2, 0];

/// `⟨φ_b|φ_a⟩` from the three stored overlaps `[x01, x02, x12]`.
pub fn overlap(xs: &[C64; 3], a: usize, b: usize) -> C64 {
    match (a, b) {
        _ if a == b => C64::new(1.0, 0.0),
        (0, 1) => xs[0],
        (0, 2) => xs[1],
        (1, 2) => xs[2],
        _ => overlap(xs, b, a).conj(),
    }
}

/// Coherence factors `c_ij(t)` of the two-qubit channel, up to the system
/// phases (which only conjugate the Choi matrix by a diagonal unitary).
pub fn two_qubit_factors(xs: &[C64; 3]) -> Vec<Vec<C64>> {
    (0..4)
        .map(|i| (0..4).map(|j| overlap(xs, BRANCH_OF[i], BRANCH_OF[j]).conj()).collect())
        .collect()
}

/// Spectrum of the intermediate two-qubit Choi matrix between `xs_m` and
/// `xs_f`, built from first principles.
pub fn intermediate_choi_eigenvalues_2q(xs_m: &[C64; 3], xs_f: &[C64; 3]) -> Vec<f64> {
    let cm = two_qubit_factors(xs_m);
    let cf = two_qubit_factors(xs_f);
    let y: Vec<Vec<C64>> = (0..4)
        .map(|i| (0..4).map(|j| cf[i][j] / cm[i][j]).collect())
        .collect();
    hermitian_eigenvalues(dephasing_choi(&y))
}

/// `‖ρ^{T_A}‖₁ - 1` for `ρ_SA = (Φ_x ⊗ I)|φ+⟩⟨φ+|`, by explicit partial
/// transpose and eigensolve.
pub fn negativity_by_partial_transpose(x: C64) -> f64 {
    // basis |s a⟩: gg, ge, eg, ee
    let mut rho = DMatrix::from_element(4, 4, C64::new(0.0, 0.0));
    rho[(0, 0)] = C64::new(0.5, 0.0);
    rho[(3, 3)] = C64::new(0.5, 0.0);
    rho[(0, 3)] = 0.5 * x.conj();
    rho[(3, 0)] = 0.5 * x;
    let pt = DMatrix::from_fn(4, 4, |r, c| {
        let (s, a) = (r / 2, r % 2);
        let (t, b) = (c / 2, c % 2);
        rho[(2 * s + b, 2 * t + a)]
    });
    let trace_norm: f64 = hermitian_eigenvalues(pt).iter().map(|v| v.abs()).sum();
    trace_norm - 1.0
}
