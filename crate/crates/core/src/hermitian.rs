//! Small dense complex matrices and a cyclic Jacobi eigensolver for the
//! Hermitian case.
//!
//! The matrices here are at most 16×16, where Jacobi is both simple and
//! accurate to a few ulps in the eigenvalues.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Off-diagonal Frobenius norm (relative to `max(1, ‖A‖_F)`) at which the
/// sweep stops.
pub const JACOBI_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 64;

/// Row-major square complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self[(r, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    out[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |A - A†|` over entries.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| {
                    let v = self[(r, c)];
                    format!("{:+.4}{:+.4}i", v.re, v.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Eigen-decomposition `A = V diag(λ) V†` with ascending `λ`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `j` is the eigenvector of `values[j]`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        CMatrix::from_fn(n, |r, c| {
            (0..n)
                .map(|j| v[(r, j)] * self.values[j] * v[(c, j)].conj())
                .sum()
        })
    }
}

/// Tolerance for the Hermiticity precondition of [`eigh`].
pub const HERMITIAN_TOL: f64 = 1e-12;

fn off_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi for Hermitian matrices.
///
/// Each rotation first strips the phase of `a_pq` and then applies the real
/// symmetric rotation that annihilates it.
pub fn eigh(input: &CMatrix) -> Result<HermitianEigen> {
    let residual = input.hermiticity_residual();
    let scale = input.frobenius().max(1.0);
    if residual > HERMITIAN_TOL * scale {
        return Err(Error::NonHermitian { residual });
    }
    let n = input.dim();
    let mut a = input.clone();
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
    }
    let mut v = CMatrix::identity(n);
    let stop = JACOBI_TOL * scale;

    for _ in 0..MAX_SWEEPS {
        if off_norm(&a) <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = apq / r; // e^{iφ}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on columns (p, q)
                let jpp = Complex64::new(c, 0.0);
                let jpq = Complex64::new(s, 0.0);
                let jqp = -s * phase.conj();
                let jqq = c * phase.conj();
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * jpp + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * jqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Ascending eigenvalues only.
pub fn eigvals_hermitian(a: &CMatrix) -> Result<Vec<f64>> {
    eigh(a).map(|e| e.values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
        let mut m = CMatrix::zeros(n);
        for r in 0..n {
            m[(r, r)] = Complex64::new(rng.gen_range(-2.0..2.0), 0.0);
            for c in (r + 1)..n {
                let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(r, c)] = v;
                m[(c, r)] = v.conj();
            }
        }
        m
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let d = [3.0, -1.0, 2.0, 0.5];
        let m = CMatrix::from_fn(4, |r, c| {
            if r == c {
                Complex64::new(d[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        assert_eq!(eigvals_hermitian(&m).unwrap(), vec![-1.0, 0.5, 2.0, 3.0]);
    }

    #[test]
    fn pauli_y() {
        let mut m = CMatrix::zeros(2);
        m[(0, 1)] = Complex64::new(0.0, -1.0);
        m[(1, 0)] = Complex64::new(0.0, 1.0);
        let ev = eigvals_hermitian(&m).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(eigh(&m), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn random_16x16_reconstruction() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let m = random_hermitian(16, &mut rng);
            let e = eigh(&m).unwrap();
            assert!(e.reconstruct().max_abs_diff(&m) <= 1e-10);
            let vv = e.vectors.adjoint().mul(&e.vectors);
            assert!(vv.max_abs_diff(&CMatrix::identity(16)) <= 1e-12);
            let sum: f64 = e.values.iter().sum();
            assert!((sum - m.trace().re).abs() <= 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
