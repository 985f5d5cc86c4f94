//! Mutual information, measurement-optimized classical correlation,
//! entropic quantum discord and Wootters concurrence of two-qubit states.
//!
//! The measurement always acts on subsystem B (the transverse mode). A basis
//! is labelled by the Bloch angles of its first vector
//! |Ψ⟩ = cos(θ/2)|0⟩ + sin(θ/2)e^{iφ}|1⟩; the second is
//! |Ψ⊥⟩ = sin(θ/2)|0⟩ − cos(θ/2)e^{iφ}|1⟩.

mod optimizer;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use optimizer::{minimize_on_sphere, nelder_mead, Minimum, OptimizerConfig, SimplexResult};

use crate::error::{Error, Result};
use crate::qmath::{
    eigenvalues_2x2, hermitian_eigensystem, partial_trace, ComplexMatrix, DensityMatrix4, Subsystem, C64,
    EIGENVALUE_FLOOR, ZERO,
};

/// Outcomes less likely than this are skipped.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// Discord in (−DISCORD_CLAMP, 0) is reported as 0.
pub const DISCORD_CLAMP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementAngles {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementAngles {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::invalid(format!(
                "measurement angles (θ={theta}, φ={phi}) outside [0,π]×[0,2π)"
            )));
        }
        Ok(Self { theta, phi })
    }

    pub(crate) fn new_unchecked(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    /// Maps arbitrary (θ, φ) onto the canonical ranges without changing the
    /// measurement (the basis vectors only pick up global phases).
    pub fn normalized(self) -> Self {
        let two_pi = 2.0 * PI;
        let mut theta = self.theta.rem_euclid(two_pi);
        let mut phi = self.phi;
        if theta > PI {
            theta = two_pi - theta;
            phi += PI;
        }
        phi = phi.rem_euclid(two_pi);
        if phi >= two_pi {
            phi = 0.0;
        }
        Self { theta, phi }
    }

    /// (|Ψ⟩, |Ψ⊥⟩)
    pub fn basis(&self) -> [[C64; 2]; 2] {
        let (s, c) = (0.5 * self.theta).sin_cos();
        let e = C64::from_polar(1.0, self.phi);
        [[C64::new(c, 0.0), e * s], [C64::new(s, 0.0), -e * c]]
    }
}

/// All correlation measures of one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub mutual_information: f64,
    pub classical_correlation: f64,
    pub discord: f64,
    pub concurrence: f64,
    pub optimal_angles: MeasurementAngles,
    /// False when the simplex stage ran out of evaluations.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalCorrelation {
    pub value: f64,
    pub angles: MeasurementAngles,
    /// Minimal measured conditional entropy.
    pub conditional_entropy: f64,
    pub converged: bool,
    pub evaluations: usize,
}

/// S(ρ_A) + S(ρ_B) − S(ρ), in bits.
pub fn mutual_information(rho: &DensityMatrix4) -> f64 {
    let sa = partial_trace(rho, Subsystem::A).entropy();
    let sb = partial_trace(rho, Subsystem::B).entropy();
    sa + sb - rho.entropy()
}

/// Precomputed entries for fast evaluation of Σ_k p_k S(ρ_k).
///
/// Each post-measurement state is (conditional A state) ⊗ |b_k⟩⟨b_k|, so its
/// entropy is that of the 2x2 conditional state.
struct ConditionalEntropy {
    rho: [[C64; 4]; 4],
}

impl ConditionalEntropy {
    fn new(rho: &DensityMatrix4) -> Self {
        let mut r = [[ZERO; 4]; 4];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = rho.get(i, j);
            }
        }
        Self { rho: r }
    }

    fn evaluate(&self, theta: f64, phi: f64) -> f64 {
        let basis = MeasurementAngles::new_unchecked(theta, phi).basis();
        basis.iter().map(|b| self.outcome_term(b)).sum()
    }

    /// p_k S(ρ_k) for one projector |b⟩⟨b| on B.
    fn outcome_term(&self, b: &[C64; 2]) -> f64 {
        // σ[a][a'] = Σ_{j,j'} b̄_j ρ[(a,j),(a',j')] b_j'
        let entry = |a: usize, ap: usize| -> C64 {
            let mut acc = ZERO;
            for j in 0..2 {
                let mut inner = ZERO;
                for jp in 0..2 {
                    inner += self.rho[2 * a + j][2 * ap + jp] * b[jp];
                }
                acc += b[j].conj() * inner;
            }
            acc
        };
        let s00 = entry(0, 0).re;
        let s11 = entry(1, 1).re;
        let s01 = entry(0, 1);
        let p = s00 + s11;
        if p < PROBABILITY_FLOOR {
            return 0.0;
        }
        let (l0, l1) = eigenvalues_2x2(s00 / p, s11 / p, s01 / p);
        let h = |l: f64| if l > EIGENVALUE_FLOOR { -l * l.log2() } else { 0.0 };
        p * (h(l0) + h(l1))
    }
}

/// Σ_k p_k S(ρ_k) for the projective measurement on B labelled by `angles`.
pub fn measured_conditional_entropy(rho: &DensityMatrix4, angles: MeasurementAngles) -> f64 {
    ConditionalEntropy::new(rho).evaluate(angles.theta, angles.phi)
}

/// S(ρ_A) − min over measurements of the conditional entropy.
pub fn classical_correlation(rho: &DensityMatrix4, search: &OptimizerConfig) -> ClassicalCorrelation {
    let ce = ConditionalEntropy::new(rho);
    let min = minimize_on_sphere(search, |t, p| ce.evaluate(t, p));
    let sa = partial_trace(rho, Subsystem::A).entropy();
    ClassicalCorrelation {
        value: sa - min.value,
        angles: min.angles,
        conditional_entropy: min.value,
        converged: min.converged,
        evaluations: min.evaluations,
    }
}

/// I_m − C, with optimization residue in (−1e-9, 0) clamped to 0.
pub fn quantum_discord(rho: &DensityMatrix4, search: &OptimizerConfig) -> (f64, bool) {
    let c = classical_correlation(rho, search);
    (clamp_discord(mutual_information(rho) - c.value), c.converged)
}

fn clamp_discord(q: f64) -> f64 {
    if q < 0.0 && q > -DISCORD_CLAMP {
        0.0
    } else {
        q
    }
}

/// σ_y ⊗ σ_y in the computational basis (real).
fn spin_flip() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4);
    m[(0, 3)] = C64::new(-1.0, 0.0);
    m[(1, 2)] = C64::new(1.0, 0.0);
    m[(2, 1)] = C64::new(1.0, 0.0);
    m[(3, 0)] = C64::new(-1.0, 0.0);
    m
}

/// Square roots of the eigenvalues of ρ(σ_y⊗σ_y)ρ*(σ_y⊗σ_y), descending.
///
/// With ρ = W W† (columns √λ_k v_k), these are the singular values of the
/// symmetric matrix τ = Wᵀ(σ_y⊗σ_y)W. Singular values are taken from the
/// spectrum of the Hermitian dilation [[0, τ], [τ†, 0]], which keeps them
/// accurate to machine precision in absolute terms instead of taking square
/// roots of rounding noise.
pub fn wootters_lambdas(rho: &DensityMatrix4) -> [f64; 4] {
    let e = rho.eigensystem();
    let columns: Vec<Vec<C64>> = e
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > EIGENVALUE_FLOOR)
        .map(|(k, &l)| e.vector(k).iter().map(|z| z * l.sqrt()).collect())
        .collect();
    let r = columns.len();
    let mut out = [0.0; 4];
    if r == 0 {
        return out;
    }
    let flip = spin_flip();
    let mut dilation = ComplexMatrix::zeros(2 * r);
    for k in 0..r {
        let flipped = flip.mul_vec(&columns[k]);
        for l in 0..r {
            let tau: C64 = columns[l].iter().zip(&flipped).map(|(a, b)| a * b).sum();
            dilation[(l, r + k)] = tau;
            dilation[(r + k, l)] = tau.conj();
        }
    }
    let values = hermitian_eigensystem(&dilation)
        .expect("dilation is Hermitian by construction")
        .values;
    for k in 0..r {
        out[k] = values[k].max(0.0);
    }
    out
}

/// max(0, λ₁ − λ₂ − λ₃ − λ₄)
pub fn concurrence(rho: &DensityMatrix4) -> f64 {
    let l = wootters_lambdas(rho);
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

/// Largest modulus among entries off the diagonal and anti-diagonal.
pub fn off_x_magnitude(rho: &DensityMatrix4) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            if i != j && i + j != 3 {
                worst = worst.max(rho.get(i, j).norm());
            }
        }
    }
    worst
}

/// Closed form 2·max(0, |ρ₁₄| − √(ρ₂₂ρ₃₃), |ρ₂₃| − √(ρ₁₁ρ₄₄)) for X-shaped states.
pub fn xstate_concurrence(rho: &DensityMatrix4) -> Result<f64> {
    let off = off_x_magnitude(rho);
    if off > 1e-10 {
        return Err(Error::invalid(format!(
            "not an X-state: off-X entry of magnitude {off:.3e}"
        )));
    }
    let d = |i: usize| rho.get(i, i).re.max(0.0);
    let a = rho.get(0, 3).norm() - (d(1) * d(2)).sqrt();
    let b = rho.get(1, 2).norm() - (d(0) * d(3)).sqrt();
    Ok(2.0 * a.max(b).max(0.0))
}

/// Every measure for one state.
pub fn correlation_report(rho: &DensityMatrix4, search: &OptimizerConfig) -> CorrelationReport {
    let mutual_information = mutual_information(rho);
    let c = classical_correlation(rho, search);
    CorrelationReport {
        mutual_information,
        classical_correlation: c.value,
        discord: clamp_discord(mutual_information - c.value),
        concurrence: concurrence(rho),
        optimal_angles: c.angles,
        converged: c.converged,
    }
}
