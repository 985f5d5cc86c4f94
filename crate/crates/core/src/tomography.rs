//! Simulated two-qubit tomography of the spin-orbit state and a Monte Carlo
//! over imperfections of the analysis stage.
//!
//! Each qubit is analysed in one of three settings (Z, X, Y), realized by a
//! half-wave plate at angle α (a Dove prism for the mode qubit) plus, for Y, a
//! quarter-wave phase χ = π/2. The two outcome states of a setting are
//!
//! ```text
//! |a+⟩ = cos2α|0⟩ + e^{iχ} sin2α|1⟩      (transmitted arm, factor T)
//! |a−⟩ = sin2α|0⟩ − e^{iχ} cos2α|1⟩      (reflected arm, factor R)
//! ```
//!
//! Reconstruction is linear inversion over the 16 projectors
//! {Z+, Z−, X+, Y+}⊗{Z+, Z−, X+, Y+}, followed by clipping negative
//! eigenvalues and renormalizing the trace.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_8};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlations::{correlation_report, CorrelationReport, OptimizerConfig};
use crate::error::{Error, Result};
use crate::qmath::{kron, pauli, ComplexMatrix, DensityMatrix4, C64, ONE, ZERO};

/// Single-qubit projector label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Setting {
    ZPlus,
    ZMinus,
    XPlus,
    YPlus,
}

impl Setting {
    pub const ALL: [Setting; 4] = [Setting::ZPlus, Setting::ZMinus, Setting::XPlus, Setting::YPlus];

    pub fn ket(self) -> [C64; 2] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Setting::ZPlus => [ONE, ZERO],
            Setting::ZMinus => [ZERO, ONE],
            Setting::XPlus => [C64::new(s, 0.0), C64::new(s, 0.0)],
            Setting::YPlus => [C64::new(s, 0.0), C64::new(0.0, s)],
        }
    }

    fn basis(self) -> Basis {
        match self {
            Setting::ZPlus | Setting::ZMinus => Basis::Z,
            Setting::XPlus => Basis::X,
            Setting::YPlus => Basis::Y,
        }
    }

    fn plus(self) -> bool {
        self != Setting::ZMinus
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Setting::ZPlus => "Z+",
            Setting::ZMinus => "Z-",
            Setting::XPlus => "X+",
            Setting::YPlus => "Y+",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Basis {
    Z,
    X,
    Y,
}

impl Basis {
    const ALL: [Basis; 3] = [Basis::Z, Basis::X, Basis::Y];

    /// (α, χ) of the analysis wave plates.
    fn plate(self) -> (f64, f64) {
        match self {
            Basis::Z => (0.0, 0.0),
            Basis::X => (FRAC_PI_8, 0.0),
            Basis::Y => (FRAC_PI_8, FRAC_PI_2),
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Outcome kets (+, −) of a plate at `alpha` with phase `chi`.
fn analysis_kets(alpha: f64, chi: f64) -> [[C64; 2]; 2] {
    let (s, c) = (2.0 * alpha).sin_cos();
    let e = C64::from_polar(1.0, chi);
    [[C64::new(c, 0.0), e * s], [C64::new(s, 0.0), -e * c]]
}

fn two_qubit_ket(a: &[C64; 2], b: &[C64; 2]) -> [C64; 4] {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    pub polarization: Setting,
    pub mode: Setting,
    pub matrix: ComplexMatrix,
}

/// The 16 product projectors, polarization setting major.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorSet {
    pub projectors: Vec<Projector>,
}

impl Default for ProjectorSet {
    fn default() -> Self {
        let mut projectors = Vec::with_capacity(16);
        for a in Setting::ALL {
            for b in Setting::ALL {
                let ket = two_qubit_ket(&a.ket(), &b.ket());
                projectors.push(Projector {
                    polarization: a,
                    mode: b,
                    matrix: ComplexMatrix::projector(&ket),
                });
            }
        }
        Self { projectors }
    }
}

impl ProjectorSet {
    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    /// Real 16×16 matrix A with p = A·r, r_{4j+k} = Tr[ρ σj⊗σk].
    pub fn design_matrix(&self) -> Vec<[f64; 16]> {
        let paulis: Vec<ComplexMatrix> = (0..16).map(|n| kron(&pauli(n / 4), &pauli(n % 4))).collect();
        self.projectors
            .iter()
            .map(|p| {
                let mut row = [0.0; 16];
                for (n, s) in paulis.iter().enumerate() {
                    row[n] = p.matrix.trace_product(s).re / 4.0;
                }
                row
            })
            .collect()
    }
}

/// Tr[ρ Πᵢ] for every projector.
pub fn projection_probabilities(rho: &DensityMatrix4, set: &ProjectorSet) -> Vec<f64> {
    set.projectors
        .iter()
        .map(|p| rho.matrix().trace_product(&p.matrix).re)
        .collect()
}

/// Gaussian elimination with partial pivoting on a square system.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Linear-inversion estimate ¼ Σ r_jk σj⊗σk, before any positivity repair.
/// May have negative eigenvalues for inconsistent data.
pub fn linear_inversion(probs: &[f64], set: &ProjectorSet) -> Result<ComplexMatrix> {
    if probs.len() != set.len() || set.len() != 16 {
        return Err(Error::Configuration(format!(
            "need 16 probabilities and 16 projectors, got {} and {}",
            probs.len(),
            set.len()
        )));
    }
    let a = set.design_matrix().into_iter().map(|r| r.to_vec()).collect();
    let r = solve(a, probs.to_vec())
        .ok_or_else(|| Error::Configuration("projector set is not informationally complete".into()))?;
    let mut rho = ComplexMatrix::zeros(4);
    for (n, rn) in r.iter().enumerate() {
        if *rn != 0.0 {
            rho = &rho + &kron(&pauli(n / 4), &pauli(n % 4)).scale_real(rn / 4.0);
        }
    }
    Ok(rho)
}

/// Clips negative eigenvalues to zero and renormalizes the trace.
pub fn project_to_density(m: &ComplexMatrix) -> Result<DensityMatrix4> {
    if m.dim() != 4 {
        return Err(Error::invalid(format!("expected 4x4, got {0}x{0}", m.dim())));
    }
    let es = crate::qmath::hermitian_eigensystem(m)?;
    let clipped: Vec<f64> = es.values.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidDensity("no positive spectrum to renormalize".into()));
    }
    let mut rho = ComplexMatrix::zeros(4);
    for (k, &l) in clipped.iter().enumerate() {
        if l > 0.0 {
            rho = &rho + &ComplexMatrix::projector(&es.vector(k)).scale_real(l / total);
        }
    }
    // remove round-off asymmetry
    let rho = (&rho + &rho.adjoint()).scale_real(0.5);
    Ok(DensityMatrix4::new_unchecked(rho))
}

/// Linear inversion followed by positivity repair.
pub fn reconstruct(probs: &[f64], set: &ProjectorSet) -> Result<DensityMatrix4> {
    project_to_density(&linear_inversion(probs, set)?)
}

/// Imperfections of the analysis stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Half-range of the uniform wave-plate angle error, degrees.
    pub hwp_jitter: f64,
    /// Intensity reflectance of the analysis beam splitters.
    pub bs_r: f64,
    /// Intensity transmittance of the analysis beam splitters.
    pub bs_t: f64,
    pub runs: usize,
    pub seed: u64,
}

impl NoiseConfig {
    /// Ideal analysis stage.
    pub fn noiseless(runs: usize, seed: u64) -> Self {
        Self {
            hwp_jitter: 0.0,
            bs_r: 0.5,
            bs_t: 0.5,
            runs,
            seed,
        }
    }

    /// ±1° plates, R = 0.48, T = 0.49.
    pub fn typical(runs: usize, seed: u64) -> Self {
        Self {
            hwp_jitter: 1.0,
            bs_r: 0.48,
            bs_t: 0.49,
            runs,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hwp_jitter >= 0.0 && self.hwp_jitter.is_finite()) {
            return Err(Error::invalid(format!("hwp_jitter {} must be ≥ 0", self.hwp_jitter)));
        }
        if !(self.bs_r > 0.0 && self.bs_t > 0.0 && self.bs_r + self.bs_t <= 1.0 + 1e-12) {
            return Err(Error::invalid(format!(
                "need R, T > 0 with R + T ≤ 1 (R={}, T={})",
                self.bs_r, self.bs_t
            )));
        }
        Ok(())
    }

    /// Generator for one run: root seed, stream = run index.
    pub fn rng(&self, run_index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(run_index);
        rng
    }
}

/// Outcome probabilities of every setting pair under the noise model,
/// mapped onto the 16 nominal projectors.
fn noisy_probabilities(rho: &DensityMatrix4, noise: &NoiseConfig, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let j = noise.hwp_jitter.to_radians();
    let mut jitter = || if j > 0.0 { rng.gen_range(-j..=j) } else { 0.0 };
    // one plate error per (qubit, basis), reused by every pair that setting enters
    let mut offsets = [[0.0; 3]; 2];
    for qubit in offsets.iter_mut() {
        for o in qubit.iter_mut() {
            *o = jitter();
        }
    }
    let factor = [noise.bs_t, noise.bs_r];

    // [basis_a][basis_b][outcome_a][outcome_b]
    let mut table = [[[[0.0f64; 2]; 2]; 3]; 3];
    for ba in Basis::ALL {
        for bb in Basis::ALL {
            let (alpha_a, chi_a) = ba.plate();
            let (alpha_b, chi_b) = bb.plate();
            let ka = analysis_kets(alpha_a + offsets[0][ba.index()], chi_a);
            let kb = analysis_kets(alpha_b + offsets[1][bb.index()], chi_b);
            let mut sum = 0.0;
            let mut cell = [[0.0; 2]; 2];
            for (sa, va) in ka.iter().enumerate() {
                for (sb, vb) in kb.iter().enumerate() {
                    let ket = two_qubit_ket(va, vb);
                    let p = rho.matrix().trace_product(&ComplexMatrix::projector(&ket)).re.max(0.0);
                    let q = p * factor[sa] * factor[sb];
                    cell[sa][sb] = q;
                    sum += q;
                }
            }
            if sum > 0.0 {
                for row in cell.iter_mut() {
                    for v in row.iter_mut() {
                        *v /= sum;
                    }
                }
            }
            table[ba.index()][bb.index()] = cell;
        }
    }

    let pick = |s: Setting| (s.basis().index(), if s.plus() { 0 } else { 1 });
    let mut probs = Vec::with_capacity(16);
    for a in Setting::ALL {
        for b in Setting::ALL {
            let (ia, oa) = pick(a);
            let (ib, ob) = pick(b);
            probs.push(table[ia][ib][oa][ob]);
        }
    }
    probs
}

/// One noisy tomography pass; deterministic in (seed, run_index).
pub fn perturb_and_measure(rho_true: &DensityMatrix4, noise: &NoiseConfig, run_index: u64) -> Result<DensityMatrix4> {
    noise.validate()?;
    let mut rng = noise.rng(run_index);
    let probs = noisy_probabilities(rho_true, noise, &mut rng);
    reconstruct(&probs, &ProjectorSet::default())
}

/// Mean, sample standard deviation and raw values of one measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureStats {
    pub mean: f64,
    pub std: f64,
    pub raw: Vec<f64>,
}

impl MeasureStats {
    pub fn from_values(raw: Vec<f64>) -> Self {
        let n = raw.len() as f64;
        let mean = raw.iter().sum::<f64>() / n;
        let var = if raw.len() > 1 {
            raw.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        // keep the mean inside [min, max] despite summation round-off
        let (lo, hi) = raw.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
        Self {
            mean: mean.clamp(lo, hi),
            std: var.sqrt(),
            raw,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationStats {
    pub classical_correlation: MeasureStats,
    pub concurrence: MeasureStats,
    pub discord: MeasureStats,
    pub mutual_information: MeasureStats,
    /// Runs whose optimizer hit its evaluation budget.
    pub unconverged_runs: usize,
}

/// Correlations of `noise.runs` independent noisy reconstructions.
/// Runs execute in parallel; results are ordered by run index.
pub fn monte_carlo_correlations(
    rho_true: &DensityMatrix4,
    noise: &NoiseConfig,
    search: &OptimizerConfig,
) -> Result<CorrelationStats> {
    noise.validate()?;
    if noise.runs < 2 {
        return Err(Error::invalid(format!("need at least 2 runs, got {}", noise.runs)));
    }
    let reports: Vec<CorrelationReport> = (0..noise.runs as u64)
        .into_par_iter()
        .map(|i| perturb_and_measure(rho_true, noise, i).map(|r| correlation_report(&r, search)))
        .collect::<Result<_>>()?;
    let col = |f: fn(&CorrelationReport) -> f64| MeasureStats::from_values(reports.iter().map(f).collect());
    Ok(CorrelationStats {
        classical_correlation: col(|r| r.classical_correlation),
        concurrence: col(|r| r.concurrence),
        discord: col(|r| r.discord),
        mutual_information: col(|r| r.mutual_information),
        unconverged_runs: reports.iter().filter(|r| !r.converged).count(),
    })
}
