use std::fmt;

use serde::{Deserialize, Serialize};

use super::eigen::{hermitian_eigensystem, Eigensystem};
use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Eigenvalues at or below this are treated as exactly zero.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

/// The first property a candidate density matrix fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation {
    Dimension { dim: usize },
    NotHermitian { error: f64 },
    Trace { trace_re: f64, trace_im: f64 },
    NotPositive { min_eigenvalue: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Dimension { dim } => write!(f, "dimension {dim} is not 2 or 4"),
            Violation::NotHermitian { error } => {
                write!(f, "not Hermitian: max |M - M†| = {error:.3e}")
            }
            Violation::Trace { trace_re, trace_im } => {
                write!(f, "trace {trace_re:.12}{trace_im:+.3e}i is not 1")
            }
            Violation::NotPositive { min_eigenvalue } => {
                write!(f, "not positive semidefinite: eigenvalue {min_eigenvalue:.3e}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Validation {
    pub valid: bool,
    pub violation: Option<Violation>,
}

/// Checks Hermiticity, unit trace and positivity (in that order) with one tolerance.
pub fn validate_density(m: &ComplexMatrix, tol: f64) -> Validation {
    check(m, tol, tol, tol)
}

fn check(m: &ComplexMatrix, herm_tol: f64, trace_tol: f64, psd_tol: f64) -> Validation {
    let fail = |v| Validation {
        valid: false,
        violation: Some(v),
    };
    if m.dim() != 2 && m.dim() != 4 {
        return fail(Violation::Dimension { dim: m.dim() });
    }
    let error = m.hermiticity_error();
    if error > herm_tol {
        return fail(Violation::NotHermitian { error });
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > trace_tol || tr.im.abs() > trace_tol {
        return fail(Violation::Trace {
            trace_re: tr.re,
            trace_im: tr.im,
        });
    }
    let values = hermitian_eigensystem(m).expect("hermiticity already checked").values;
    let min_eigenvalue = *values.last().expect("non-empty spectrum");
    if min_eigenvalue < -psd_tol {
        return fail(Violation::NotPositive { min_eigenvalue });
    }
    Validation {
        valid: true,
        violation: None,
    }
}

/// A validated density operator of dimension `D` (2 for one qubit, 4 for two).
#[derive(Clone, PartialEq)]
pub struct DensityMatrix<const D: usize> {
    matrix: ComplexMatrix,
}

pub type DensityMatrix2 = DensityMatrix<2>;
pub type DensityMatrix4 = DensityMatrix<4>;

impl<const D: usize> DensityMatrix<D> {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() != D {
            return Err(Error::invalid(format!(
                "expected a {D}x{D} matrix, got {}x{}",
                matrix.dim(),
                matrix.dim()
            )));
        }
        match check(&matrix, HERMITIAN_TOL, TRACE_TOL, PSD_TOL).violation {
            None => Ok(Self { matrix }),
            Some(v) => Err(Error::InvalidDensity(v.to_string())),
        }
    }

    /// Caller guarantees the invariants (used for values built by exact construction).
    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.dim(), D);
        Self { matrix }
    }

    /// Pure state |ψ⟩⟨ψ| of a normalized ket.
    pub fn pure(ket: &[C64]) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if ket.len() != D || (norm - 1.0).abs() > TRACE_TOL {
            return Err(Error::invalid(format!(
                "pure state needs a normalized {D}-component ket (norm² = {norm})"
            )));
        }
        Ok(Self::new_unchecked(ComplexMatrix::projector(ket)))
    }

    pub fn maximally_mixed() -> Self {
        Self::new_unchecked(ComplexMatrix::identity(D).scale_real(1.0 / D as f64))
    }

    /// Convex combination Σ wᵢ ρᵢ; weights must be non-negative and sum to one.
    pub fn mixture(parts: &[(f64, &Self)]) -> Result<Self> {
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("mixture weights must be non-negative and sum to 1"));
        }
        let mut m = ComplexMatrix::zeros(D);
        for (w, rho) in parts {
            m = &m + &rho.matrix.scale_real(*w);
        }
        Ok(Self::new_unchecked(m))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    pub fn eigensystem(&self) -> Eigensystem {
        hermitian_eigensystem(&self.matrix).expect("density matrices are Hermitian")
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigensystem().values
    }

    /// Number of eigenvalues above `threshold`.
    pub fn rank(&self, threshold: f64) -> usize {
        self.eigenvalues().iter().filter(|&&l| l > threshold).count()
    }

    pub fn entropy(&self) -> f64 {
        von_neumann_entropy(self)
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    /// U ρ U†; `u` must be unitary.
    pub fn transform(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.dim() != D {
            return Err(Error::invalid("unitary dimension mismatch"));
        }
        Self::new(self.matrix.conjugate_by(u))
    }

    /// Matrix square root through the eigendecomposition, negative eigenvalues clipped.
    pub fn sqrt(&self) -> ComplexMatrix {
        let e = self.eigensystem();
        let mut out = ComplexMatrix::zeros(D);
        for (k, &l) in e.values.iter().enumerate() {
            if l <= EIGENVALUE_FLOOR {
                continue;
            }
            let v = e.vector(k);
            let s = l.sqrt();
            for i in 0..D {
                for j in 0..D {
                    out[(i, j)] += v[i] * v[j].conj() * s;
                }
            }
        }
        out
    }
}

impl<const D: usize> fmt::Debug for DensityMatrix<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityMatrix<{D}>({:?})", self.matrix)
    }
}

/// −Σ λ log₂ λ over eigenvalues above [`EIGENVALUE_FLOOR`].
pub fn von_neumann_entropy<const D: usize>(rho: &DensityMatrix<D>) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues())
}

pub(crate) fn entropy_of_spectrum(values: &[f64]) -> f64 {
    let s: f64 = values
        .iter()
        .filter(|&&l| l > EIGENVALUE_FLOOR)
        .map(|&l| -l * l.log2())
        .sum();
    s.max(0.0)
}

/// Subsystem tag: A is polarization (left factor), B is transverse mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Reduced state of the kept subsystem.
pub fn partial_trace(rho: &DensityMatrix4, keep: Subsystem) -> DensityMatrix2 {
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(2);
    for x in 0..2 {
        for y in 0..2 {
            let mut acc = ZERO;
            for t in 0..2 {
                let (i, j) = match keep {
                    Subsystem::A => (2 * x + t, 2 * y + t),
                    Subsystem::B => (2 * t + x, 2 * t + y),
                };
                acc += m[(i, j)];
            }
            out[(x, y)] = acc;
        }
    }
    DensityMatrix2::new_unchecked(out)
}

/// Uhlmann fidelity (Tr √(√ρ σ √ρ))².
pub fn fidelity<const D: usize>(rho: &DensityMatrix<D>, sigma: &DensityMatrix<D>) -> f64 {
    let s = rho.sqrt();
    let inner = &(&s * sigma.matrix()) * &s;
    let values = hermitian_eigensystem(&inner)
        .expect("product of Hermitian factors is Hermitian")
        .values;
    let root: f64 = values.iter().map(|&l| l.max(0.0).sqrt()).sum();
    (root * root).min(1.0)
}
