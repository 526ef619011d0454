//! Brute-force reference: the spin chain in its full `2^L` Hilbert space.
//!
//! Nothing here uses the Bogoliubov machinery. Hamiltonians are built from
//! Pauli strings, diagonalized densely, and states are evolved exactly via
//! their eigendecomposition.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest chain accepted by the one-qubit oracle.
pub const MAX_SITES: usize = 12;
/// Largest chain accepted by the two-qubit oracle.
pub const MAX_SITES_TWO_QUBIT: usize = 10;
/// Even-sector splitting below which the ground state counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Real symmetric operator on `2^L` spin configurations.
///
/// Bit `j` of a basis index is 1 when spin `j` points down (`σ^z_j = -1`).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    sites: usize,
    matrix: DMatrix<f64>,
}

impl DenseOperator {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn hermiticity_residual(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).amax()
    }

    /// Parity `Π_j σ^z_j`, diagonal with entries `(-1)^{#down}`.
    pub fn parity(sites: usize) -> DenseOperator {
        let dim = 1usize << sites;
        let diag = DVector::from_fn(dim, |s, _| if s.count_ones() % 2 == 0 { 1.0 } else { -1.0 });
        DenseOperator {
            sites,
            matrix: DMatrix::from_diagonal(&diag),
        }
    }

    pub fn commutator_norm(&self, other: &DenseOperator) -> f64 {
        (&self.matrix * &other.matrix - &other.matrix * &self.matrix).amax()
    }
}

fn check_size(sites: usize, limit: usize) -> Result<()> {
    if sites < 2 {
        return Err(Error::invalid("L", format!("need at least 2 sites, got {sites}")));
    }
    if sites > limit {
        return Err(Error::SizeLimit { size: sites, limit });
    }
    Ok(())
}

/// Matrix elements of `-Σ_j (σ^x_j σ^x_{j+1} + λ σ^z_j)` (J = 1, periodic),
/// restricted to the basis states listed in `states`.
fn ising_block(sites: usize, lambda: f64, states: &[usize]) -> DMatrix<f64> {
    let dim = states.len();
    let mut index = vec![usize::MAX; 1 << sites];
    for (i, &s) in states.iter().enumerate() {
        index[s] = i;
    }
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for (i, &s) in states.iter().enumerate() {
        let down = s.count_ones() as f64;
        let sz_sum = sites as f64 - 2.0 * down;
        h[(i, i)] -= lambda * sz_sum;
        for j in 0..sites {
            let flip = (1usize << j) | (1usize << ((j + 1) % sites));
            let target = index[s ^ flip];
            if target != usize::MAX {
                h[(target, i)] -= 1.0;
            }
        }
    }
    h
}

/// Dense `H = -Σ_j (σ^x_j σ^x_{j+1} + λ σ^z_j)` with the `σ^x_L σ^x_1` bond.
pub fn build_ising_dense(sites: usize, lambda: f64) -> Result<DenseOperator> {
    check_size(sites, MAX_SITES)?;
    let states: Vec<usize> = (0..1usize << sites).collect();
    Ok(DenseOperator {
        sites,
        matrix: ising_block(sites, lambda, &states),
    })
}

fn even_states(sites: usize) -> Vec<usize> {
    (0..1usize << sites).filter(|s| s.count_ones() % 2 == 0).collect()
}

/// Eigen-decomposition of the chain restricted to even parity.
///
/// `H` commutes with the parity, so the even block is diagonalized on its
/// own and its lowest state is the even-sector ground state.
#[derive(Debug, Clone)]
pub struct EvenSector {
    sites: usize,
    /// Ascending energies.
    pub energies: Vec<f64>,
    /// Column `n` is the eigenvector of `energies[n]`, in the even basis.
    pub vectors: DMatrix<f64>,
}

impl EvenSector {
    pub fn solve(sites: usize, lambda: f64, limit: usize) -> Result<Self> {
        check_size(sites, limit)?;
        let h = ising_block(sites, lambda, &even_states(sites));
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let energies = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(order.len(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(EvenSector {
            sites,
            energies,
            vectors,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    /// Unique lowest state, or [`Error::ParityAmbiguity`].
    pub fn ground_state(&self) -> Result<DVector<f64>> {
        let splitting = self.energies.get(1).map_or(f64::INFINITY, |e1| e1 - self.energies[0]);
        if splitting < DEGENERACY_TOL {
            return Err(Error::ParityAmbiguity { splitting });
        }
        Ok(self.vectors.column(0).into_owned())
    }

    /// `e^{-iHt}|ψ⟩` for a real initial state in the even basis.
    pub fn evolve(&self, psi: &DVector<f64>, t: f64) -> DVector<Complex64> {
        let coeffs = self.vectors.transpose() * psi;
        let n = coeffs.len();
        let mut out = DVector::<Complex64>::zeros(n);
        for (k, (&c, &e)) in coeffs.iter().zip(&self.energies).enumerate() {
            let w = Complex64::from_polar(c, -e * t);
            for r in 0..n {
                out[r] += self.vectors[(r, k)] * w;
            }
        }
        out
    }
}

fn inner(a: &DVector<Complex64>, b: &DVector<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Exact `x(t) = ⟨φ_g(t)|φ_e(t)⟩` with the bath starting in `|G_g⟩`.
///
/// Precomputes everything that does not depend on time, so a whole grid of
/// samples costs one pair of diagonalizations.
#[derive(Debug, Clone)]
pub struct OracleEvolution {
    ground_energy_g: f64,
    /// `|⟨n_e|G_g⟩|²` and the matching energies of `H_e`.
    weights: Vec<f64>,
    energies_e: Vec<f64>,
    sector_e: EvenSector,
    ground_g: DVector<f64>,
}

impl OracleEvolution {
    pub fn new(sites: usize, lambda: f64, delta: f64) -> Result<Self> {
        let g = EvenSector::solve(sites, lambda, MAX_SITES)?;
        let e = EvenSector::solve(sites, lambda + delta, MAX_SITES)?;
        let ground_g = g.ground_state()?;
        let coeffs = e.vectors.transpose() * &ground_g;
        Ok(OracleEvolution {
            ground_energy_g: g.ground_energy(),
            weights: coeffs.iter().map(|c| c * c).collect(),
            energies_e: e.energies.clone(),
            sector_e: e,
            ground_g,
        })
    }

    pub fn ground_energy_g(&self) -> f64 {
        self.ground_energy_g
    }

    pub fn decoherence_factor(&self, t: f64) -> Complex64 {
        self.weights
            .iter()
            .zip(&self.energies_e)
            .map(|(&w, &e)| Complex64::from_polar(w, -(e - self.ground_energy_g) * t))
            .sum()
    }

    /// `|φ_e(t)⟩ = e^{-iH_e t}|G_g⟩` as an explicit vector.
    pub fn excited_branch_state(&self, t: f64) -> DVector<Complex64> {
        self.sector_e.evolve(&self.ground_g, t)
    }

    /// The same overlap computed from explicit state vectors.
    pub fn decoherence_factor_from_states(&self, t: f64) -> Complex64 {
        let phi_g = self.ground_g.map(|v| Complex64::from_polar(v, -self.ground_energy_g * t));
        inner(&phi_g, &self.excited_branch_state(t))
    }
}

/// One-shot oracle `x(t)`.
pub fn oracle_decoherence_factor(sites: usize, lambda: f64, delta: f64, t: f64) -> Result<Complex64> {
    Ok(OracleEvolution::new(sites, lambda, delta)?.decoherence_factor(t))
}

/// Exact two-qubit overlaps from `|G_0⟩` under `H_a = H(λ + δ_a)`.
#[derive(Debug, Clone)]
pub struct OracleTwoQubit {
    branches: [EvenSector; 3],
    ground_0: DVector<f64>,
}

impl OracleTwoQubit {
    pub fn new(sites: usize, lambda: f64, delta1: f64, delta2: f64) -> Result<Self> {
        let mk = |d: f64| EvenSector::solve(sites, lambda + d, MAX_SITES_TWO_QUBIT);
        let branches = [mk(0.0)?, mk(delta1)?, mk(delta2)?];
        let ground_0 = branches[0].ground_state()?;
        Ok(OracleTwoQubit { branches, ground_0 })
    }

    /// `[x_{0,1}, x_{0,2}, x_{1,2}]` with `x_{a,b} = ⟨φ_b(t)|φ_a(t)⟩`.
    pub fn overlaps(&self, t: f64) -> [Complex64; 3] {
        let phi: Vec<DVector<Complex64>> = self
            .branches
            .iter()
            .map(|b| b.evolve(&self.ground_0, t))
            .collect();
        [
            inner(&phi[1], &phi[0]),
            inner(&phi[2], &phi[0]),
            inner(&phi[2], &phi[1]),
        ]
    }
}

pub fn oracle_two_qubit_overlaps(
    sites: usize,
    lambda: f64,
    delta1: f64,
    delta2: f64,
    t: f64,
) -> Result<[Complex64; 3]> {
    Ok(OracleTwoQubit::new(sites, lambda, delta1, delta2)?.overlaps(t))
}
