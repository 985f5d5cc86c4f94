use std::fmt;

use crate::error::{Error, Result};
use crate::qmath::{C64, I, ONE, ZERO};

use super::ket::{Polarization, SpinOrbitKet, TransverseMode};

/// Phase picked up on reflection at a BS or PBS.
pub const REFLECTION_PHASE: C64 = I;

/// Incoherent statistical weight, path label and (possibly sub-normalized) ket.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub weight: f64,
    pub path: String,
    pub ket: SpinOrbitKet,
}

impl Branch {
    pub fn new(weight: f64, path: impl Into<String>, ket: SpinOrbitKet) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::invalid(format!("branch weight {weight} outside [0, 1]")));
        }
        Ok(Self {
            weight,
            path: path.into(),
            ket,
        })
    }

    /// weight · ‖ket‖²
    pub fn probability(&self) -> f64 {
        self.weight * self.ket.norm_sqr()
    }

    fn moved(&self, path: &str, ket: SpinOrbitKet) -> Self {
        Self {
            weight: self.weight,
            path: path.to_string(),
            ket,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ElementKind {
    /// Half-wave plate, fast axis at `angle` from horizontal (radians).
    Hwp { angle: f64 },
    /// Dove prism rotated by `angle`; acts on the mode qubit like a HWP on polarization.
    DovePrism { angle: f64 },
    /// Polarizing beam splitter: H transmitted, V reflected.
    Pbs { transmit: String, reflect: String },
    /// Beam splitter with amplitude reflection `r` and transmission `t`.
    BeamSplitter {
        r: f64,
        t: f64,
        transmit: String,
        reflect: String,
    },
    /// Neutral filter with amplitude transmission `t`.
    NeutralFilter { t: f64 },
    /// Path-length phase (PZT).
    Phase { phi: f64 },
    /// Ideal holographic mask / SLM setting the transverse mode.
    Mask { mode: TransverseMode },
    /// Ideal polarization preparer.
    PolPrep { pol: Polarization },
    /// Beam block.
    Block,
}

impl ElementKind {
    pub fn name(&self) -> &'static str {
        match self {
            ElementKind::Hwp { .. } => "HWP",
            ElementKind::DovePrism { .. } => "DP",
            ElementKind::Pbs { .. } => "PBS",
            ElementKind::BeamSplitter { .. } => "BS",
            ElementKind::NeutralFilter { .. } => "NF",
            ElementKind::Phase { .. } => "PHASE",
            ElementKind::Mask { .. } => "MASK",
            ElementKind::PolPrep { .. } => "POLPREP",
            ElementKind::Block => "BLOCK",
        }
    }

    /// Output paths for routing elements.
    pub fn routes(&self) -> Option<(&str, &str)> {
        match self {
            ElementKind::Pbs { transmit, reflect } | ElementKind::BeamSplitter { transmit, reflect, .. } => {
                Some((transmit, reflect))
            }
            _ => None,
        }
    }

    pub fn is_unitary(&self) -> bool {
        matches!(
            self,
            ElementKind::Hwp { .. } | ElementKind::DovePrism { .. } | ElementKind::Phase { .. }
        )
    }
}

/// An element placed on a path.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub kind: ElementKind,
    pub placement: String,
}

impl Element {
    pub fn new(kind: ElementKind, placement: impl Into<String>) -> Result<Self> {
        match &kind {
            ElementKind::BeamSplitter { r, t, .. } => {
                if *r < 0.0 || *t < 0.0 || r * r + t * t > 1.0 + 1e-12 {
                    return Err(Error::invalid(format!(
                        "beam splitter needs r, t ≥ 0 with r² + t² ≤ 1 (r={r}, t={t})"
                    )));
                }
            }
            ElementKind::NeutralFilter { t } => {
                if !(0.0..=1.0).contains(t) {
                    return Err(Error::invalid(format!("neutral filter t={t} outside [0, 1]")));
                }
            }
            ElementKind::Hwp { angle } | ElementKind::DovePrism { angle } if !angle.is_finite() => {
                return Err(Error::invalid("non-finite angle"));
            }
            ElementKind::Phase { phi } if !phi.is_finite() => {
                return Err(Error::invalid("non-finite phase"));
            }
            _ => {}
        }
        Ok(Self {
            kind,
            placement: placement.into(),
        })
    }

    pub fn hwp(angle: f64, path: &str) -> Self {
        Self::new(ElementKind::Hwp { angle }, path).expect("finite angle")
    }

    pub fn dove_prism(angle: f64, path: &str) -> Self {
        Self::new(ElementKind::DovePrism { angle }, path).expect("finite angle")
    }

    pub fn phase(phi: f64, path: &str) -> Self {
        Self::new(ElementKind::Phase { phi }, path).expect("finite phase")
    }

    pub fn neutral_filter(t: f64, path: &str) -> Result<Self> {
        Self::new(ElementKind::NeutralFilter { t }, path)
    }

    pub fn pbs(path: &str, transmit: &str, reflect: &str) -> Self {
        Self {
            kind: ElementKind::Pbs {
                transmit: transmit.into(),
                reflect: reflect.into(),
            },
            placement: path.into(),
        }
    }

    pub fn beam_splitter(r: f64, t: f64, path: &str, transmit: &str, reflect: &str) -> Result<Self> {
        Self::new(
            ElementKind::BeamSplitter {
                r,
                t,
                transmit: transmit.into(),
                reflect: reflect.into(),
            },
            path,
        )
    }

    pub fn mask(mode: TransverseMode, path: &str) -> Self {
        Self {
            kind: ElementKind::Mask { mode },
            placement: path.into(),
        }
    }

    pub fn pol_prep(pol: Polarization, path: &str) -> Self {
        Self {
            kind: ElementKind::PolPrep { pol },
            placement: path.into(),
        }
    }

    pub fn block(path: &str) -> Self {
        Self {
            kind: ElementKind::Block,
            placement: path.into(),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}", self.kind.name(), self.placement)
    }
}

/// Jones matrix of a half-wave plate at `angle`: [[cos2θ, sin2θ], [sin2θ, −cos2θ]].
pub fn half_wave_matrix(angle: f64) -> [[C64; 2]; 2] {
    let (s, c) = (2.0 * angle).sin_cos();
    [
        [C64::new(c, 0.0), C64::new(s, 0.0)],
        [C64::new(s, 0.0), C64::new(-c, 0.0)],
    ]
}

/// Projects one qubit onto its incoming state and re-emits it in `target`.
///
/// The incoming single-qubit state is read from the component with the
/// largest weight. Product inputs come out as |other⟩⊗|target⟩ with unit
/// efficiency (up to a global phase); entangled inputs are filtered.
fn prepare_qubit(ket: &SpinOrbitKet, on_mode: bool, target: usize) -> SpinOrbitKet {
    let a = ket.amplitudes();
    // Amplitudes split as [other qubit][prepared qubit].
    let split = |o: usize, q: usize| if on_mode { a[2 * o + q] } else { a[2 * q + o] };
    let row_norm = |o: usize| (split(o, 0).norm_sqr() + split(o, 1).norm_sqr()).sqrt();
    let dominant = if row_norm(0) >= row_norm(1) { 0 } else { 1 };
    let n = row_norm(dominant);
    let mut out = [ZERO; 4];
    if n == 0.0 {
        return SpinOrbitKet(out);
    }
    let chi = [split(dominant, 0) / n, split(dominant, 1) / n];
    for o in 0..2 {
        let amp = chi[0].conj() * split(o, 0) + chi[1].conj() * split(o, 1);
        let idx = if on_mode { 2 * o + target } else { 2 * target + o };
        out[idx] = amp;
    }
    SpinOrbitKet(out)
}

/// Propagates one branch through one element. Returns zero, one or two branches.
pub fn apply_element(element: &Element, branch: &Branch) -> Result<Vec<Branch>> {
    if branch.path != element.placement {
        return Err(Error::invalid(format!(
            "{element} cannot act on a branch travelling on `{}`",
            branch.path
        )));
    }
    let ket = &branch.ket;
    let path = element.placement.as_str();
    let out = match &element.kind {
        ElementKind::Hwp { angle } => vec![branch.moved(path, ket.apply_polarization(&half_wave_matrix(*angle)))],
        ElementKind::DovePrism { angle } => vec![branch.moved(path, ket.apply_mode(&half_wave_matrix(*angle)))],
        ElementKind::Phase { phi } => vec![branch.moved(path, *ket * C64::from_polar(1.0, *phi))],
        ElementKind::NeutralFilter { t } => vec![branch.moved(path, *ket * *t)],
        ElementKind::Mask { mode } => vec![branch.moved(path, prepare_qubit(ket, true, mode.index()))],
        ElementKind::PolPrep { pol } => vec![branch.moved(path, prepare_qubit(ket, false, pol.index()))],
        ElementKind::Block => vec![],
        ElementKind::Pbs { transmit, reflect } => {
            let h = [[ONE, ZERO], [ZERO, ZERO]];
            let v = [[ZERO, ZERO], [ZERO, REFLECTION_PHASE]];
            vec![
                branch.moved(transmit, ket.apply_polarization(&h)),
                branch.moved(reflect, ket.apply_polarization(&v)),
            ]
        }
        ElementKind::BeamSplitter {
            r,
            t,
            transmit,
            reflect,
        } => vec![
            branch.moved(transmit, *ket * *t),
            branch.moved(reflect, *ket * (REFLECTION_PHASE * *r)),
        ],
    };
    Ok(out)
}
