//! Simulation of a linear-optical circuit that prepares maximally discordant
//! mixed states of a single photon's polarization and first-order transverse
//! mode, together with the correlation measures used to characterize them.
//!
//! Modules, bottom-up:
//!
//! - [`qmath`]: 2x2 / 4x4 complex linear algebra, entropy, partial trace.
//! - [`states`]: closed-form state families.
//! - [`correlations`]: mutual information, classical correlation, discord, concurrence.
//! - [`optics`]: Jones-calculus circuit engine and the preparation circuit builder.
//! - [`circuitfile`]: line-oriented text format for circuits.
//! - [`tomography`]: simulated two-qubit tomography and component-noise Monte Carlo.
//! - [`profile`]: transverse detection-probability maps.
//! - [`figures`]: parameter sweeps and scatter data.

// index loops read closer to the algebra in the matrix kernels
#![allow(clippy::needless_range_loop)]

pub mod circuitfile;
pub mod correlations;
pub mod error;
pub mod figures;
pub mod optics;
pub mod profile;
pub mod qmath;
pub mod states;
pub mod tomography;

pub use correlations::{correlation_report, CorrelationReport, MeasurementAngles, OptimizerConfig};
pub use error::{Error, Result};
pub use optics::{Circuit, Ensemble, SpinOrbitKet};
pub use qmath::{ComplexMatrix, DensityMatrix2, DensityMatrix4};
pub use states::StateParams;
