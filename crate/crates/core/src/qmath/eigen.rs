//! Cyclic complex Jacobi eigensolver for small Hermitian matrices.

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Inputs further than this from Hermitian are rejected.
pub const HERMITIAN_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues in descending order and the matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// V Λ V†
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let v = self.vector(k);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += v[i] * v[j].conj() * lambda;
                }
            }
        }
        out
    }
}

pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<Eigensystem> {
    let herm = m.hermiticity_error();
    if herm > HERMITIAN_TOL {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian (max |M - M†| = {herm:.3e})"
        )));
    }
    Ok(jacobi(m))
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigensystem(m).map(|e| e.values)
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(m: &ComplexMatrix) -> Eigensystem {
    let n = m.dim();
    // Symmetrize so the rotations act on an exactly Hermitian matrix.
    let mut a = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Phase-align the pair, then a real rotation zeroes it:
                // tan 2θ = 2|a_pq| / (a_qq − a_pp).
                let u = apq / mag;
                let theta = 0.5 * (2.0 * mag).atan2(aqq - app);
                let (s, c) = theta.sin_cos();
                let g_pp = C64::new(c, 0.0);
                let g_pq = C64::new(s, 0.0);
                let g_qp = -u.conj() * s;
                let g_qq = u.conj() * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, new)] = v[(k, old)];
        }
    }
    Eigensystem { values, vectors }
}

/// Closed-form eigenvalues (descending) of a 2x2 Hermitian matrix.
#[inline]
pub(crate) fn eigenvalues_2x2(a: f64, d: f64, b: C64) -> (f64, f64) {
    let half_tr = 0.5 * (a + d);
    let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    (half_tr + half_gap, half_tr - half_gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::matrix::{pauli, ONE};
    use proptest::prelude::*;

    fn bell_projector() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ket = [C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)];
        ComplexMatrix::projector(&ket)
    }

    #[test]
    fn diagonal_input() {
        let e = hermitian_eigensystem(&ComplexMatrix::from_real_diagonal(&[0.25, 0.75])).unwrap();
        assert_eq!(e.values, vec![0.75, 0.25]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let e = hermitian_eigensystem(&pauli(1)).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn bell_projector_is_rank_one() {
        let e = hermitian_eigensystem(&bell_projector()).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        for &l in &e.values[1..] {
            assert!(l.abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = ONE;
        assert!(matches!(hermitian_eigensystem(&m), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn closed_form_2x2_matches_jacobi() {
        let b = C64::new(0.2, -0.1);
        let mut m = ComplexMatrix::from_real_diagonal(&[0.7, 0.3]);
        m[(0, 1)] = b;
        m[(1, 0)] = b.conj();
        let e = hermitian_eigensystem(&m).unwrap();
        let (l0, l1) = eigenvalues_2x2(0.7, 0.3, b);
        assert!((e.values[0] - l0).abs() < 1e-14);
        assert!((e.values[1] - l1).abs() < 1e-14);
    }

    fn random_hermitian(n: usize, entries: &[f64]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n);
        let mut it = entries.iter().copied();
        for i in 0..n {
            m[(i, i)] = C64::new(it.next().unwrap(), 0.0);
            for j in (i + 1)..n {
                let z = C64::new(it.next().unwrap(), it.next().unwrap());
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    proptest! {
        #[test]
        fn reconstruction_and_orthonormality(
            n in prop::sample::select(vec![2usize, 4, 8]),
            entries in prop::collection::vec(-1.0f64..1.0, 64),
        ) {
            let m = random_hermitian(n, &entries);
            let e = hermitian_eigensystem(&m).unwrap();
            let err = (&e.reconstruct() - &m).frobenius_norm();
            prop_assert!(err < 1e-9, "reconstruction error {err}");
            let gram = &e.vectors.adjoint() * &e.vectors;
            prop_assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-9);
            for w in e.values.windows(2) {
                prop_assert!(w[0] >= w[1]);
            }
            for k in 0..n {
                let v = e.vector(k);
                let mv = m.mul_vec(&v);
                for i in 0..n {
                    prop_assert!((mv[i] - v[i] * e.values[k]).norm() < 1e-9);
                }
            }
        }
    }
}
