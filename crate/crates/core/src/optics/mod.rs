//! Jones-calculus propagation of spin-orbit single-photon states.
//!
//! A photon travelling on a named path is a [`Branch`]: a statistical weight
//! (its source's emission probability) and a possibly sub-normalized ket.
//! Elements act on the branches of the path they sit on; routing elements
//! (BS, PBS) split a branch onto two output paths. Branches of one source that
//! meet on a path add coherently; different sources only mix incoherently
//! when the output density matrix is assembled.
//!
//! Conventions: reflection at a BS/PBS multiplies the amplitude by `i`;
//! the HWP matrix is [[cos2θ, sin2θ], [sin2θ, −cos2θ]] and a Dove prism at
//! angle α applies the same matrix to the {h, v} mode qubit.

mod circuit;
mod element;
mod ket;
mod mdms;

pub use circuit::{ensemble_density, run_circuit, Circuit, Ensemble, Source, MIN_DETECTION_PROBABILITY};
pub use element::{apply_element, half_wave_matrix, Branch, Element, ElementKind, REFLECTION_PHASE};
pub use ket::{Polarization, SpinOrbitKet, TransverseMode};
pub use mdms::{mdms_circuit, mz_circuit, SourceProbabilities, PZT_OFFSET};
