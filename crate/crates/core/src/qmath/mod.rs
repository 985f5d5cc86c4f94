//! Small-dimension complex linear algebra and entropy primitives.
//!
//! Basis order is fixed everywhere as {|Hh⟩,|Hv⟩,|Vh⟩,|Vv⟩} = {|00⟩,|01⟩,|10⟩,|11⟩}:
//! polarization is qubit A (left tensor factor), transverse mode is qubit B.

mod density;
mod eigen;
mod matrix;

pub use density::{
    fidelity, partial_trace, validate_density, von_neumann_entropy, DensityMatrix, DensityMatrix2, DensityMatrix4,
    Subsystem, Validation, Violation, EIGENVALUE_FLOOR, HERMITIAN_TOL, PSD_TOL, TRACE_TOL,
};
pub use eigen::{hermitian_eigensystem, hermitian_eigenvalues, Eigensystem};
pub use matrix::{pauli, tensor_product, ComplexMatrix, C64};

pub(crate) use eigen::eigenvalues_2x2;
pub(crate) use matrix::{kron, I, ONE, ZERO};
