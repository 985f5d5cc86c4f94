//! Builders for the maximally-discordant-state preparation circuit and its
//! Mach–Zehnder core.
//!
//! Path names used by the builders:
//!
//! | path | role |
//! |------|------|
//! | `s1` | SPS1 → SLM → HWP1 → PBS1 |
//! | `u`, `l` | MZ arms (H transmitted / V reflected, Dove prism + PZT on `l`) |
//! | `mz` | PBS2 bright output → NF1 → BS_MIX |
//! | `s2`, `s3` | SPS2 / SPS3 → mask, polarizer, NF2 / NF3 → PBS3 |
//! | `pm` | PBS3 output → NF4 → BS_MIX |
//! | `out` | BS_MIX detected output |
//! | `bb` | BS_MIX blocked output |
//! | `d1`, `d3` | unused PBS ports |

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::check_probability;

use super::circuit::{Circuit, Source};
use super::element::Element;
use super::ket::{Polarization, TransverseMode};

/// Emission probabilities of SPS1, SPS2, SPS3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceProbabilities {
    pub first: f64,
    pub second: f64,
    pub third: f64,
}

impl Default for SourceProbabilities {
    fn default() -> Self {
        Self {
            first: 1.0,
            second: 1.0,
            third: 1.0,
        }
    }
}

/// Phase the PZT adds on top of the requested interferometer phase: the V arm
/// is reflected twice (factor i² = −1), so the PZT is offset by π.
pub const PZT_OFFSET: f64 = PI;

fn push_interferometer(c: &mut Circuit, theta: f64, phi: f64, input: &str, output: &str) {
    c.declare_path("u")
        .declare_path("l")
        .declare_path("d1")
        .declare_path(output);
    c.add_element(Element::hwp(theta, input))
        .add_element(Element::pbs(input, "u", "l"))
        .add_element(Element::dove_prism(FRAC_PI_4, "l"))
        .add_element(Element::phase(phi + PZT_OFFSET, "l"))
        .add_element(Element::pbs("u", output, "d1"))
        .add_element(Element::pbs("l", "d1", output));
}

/// |Hh⟩ → HWP(θ) → PBS → {DP@45°, PZT(φ)} → PBS, output on path `out`.
///
/// The output ket is cos2θ|Hh⟩ + e^{iφ} sin2θ|Vv⟩.
pub fn mz_circuit(theta: f64, phi: f64) -> Circuit {
    let mut c = Circuit::new();
    c.add_source(Source::new("s1", 1.0, Polarization::H, TransverseMode::H).expect("unit weight"));
    push_interferometer(&mut c, theta, phi, "s1", "out");
    c.add_sink("out");
    c
}

/// The full three-source preparation circuit.
///
/// `theta` must lie in [0, π/4] so that cos 2θ and sin 2θ are both
/// non-negative; the normalized output is then
/// mdms(cos²2θ, m, ε) for φ = 0 and equal source probabilities.
pub fn mdms_circuit(theta: f64, phi: f64, m: f64, epsilon: f64, source_probs: SourceProbabilities) -> Result<Circuit> {
    if !(0.0..=FRAC_PI_4).contains(&theta) {
        return Err(Error::invalid(format!("HWP1 angle {theta} rad outside [0, π/4]")));
    }
    if !phi.is_finite() {
        return Err(Error::invalid("interferometer phase must be finite"));
    }
    check_probability("m", m)?;
    check_probability("epsilon", epsilon)?;
    check_probability("p^I", source_probs.first)?;
    check_probability("p^II", source_probs.second)?;
    check_probability("p^III", source_probs.third)?;

    let mut c = Circuit::new();
    c.add_source(Source::new(
        "s1",
        source_probs.first,
        Polarization::H,
        TransverseMode::H,
    )?)
    .add_source(Source::new(
        "s2",
        source_probs.second,
        Polarization::H,
        TransverseMode::H,
    )?)
    .add_source(Source::new(
        "s3",
        source_probs.third,
        Polarization::V,
        TransverseMode::H,
    )?);
    for p in ["mz", "pm", "out", "bb", "d3"] {
        c.declare_path(p);
    }

    // SPS1: SLM → MZ → NF1 → BS_MIX (reflected port is detected)
    c.add_element(Element::mask(TransverseMode::H, "s1"));
    push_interferometer(&mut c, theta, phi, "s1", "mz");
    c.add_element(Element::neutral_filter(epsilon.sqrt(), "mz")?)
        .add_element(Element::beam_splitter(FRAC_1_SQRT_2, FRAC_1_SQRT_2, "mz", "bb", "out")?);

    // SPS2 → |Hv⟩, SPS3 → |Vh⟩, combined on PBS3
    c.add_element(Element::mask(TransverseMode::V, "s2"))
        .add_element(Element::pol_prep(Polarization::H, "s2"))
        .add_element(Element::neutral_filter(m.sqrt(), "s2")?)
        .add_element(Element::pbs("s2", "pm", "d3"))
        .add_element(Element::mask(TransverseMode::H, "s3"))
        .add_element(Element::pol_prep(Polarization::V, "s3"))
        .add_element(Element::neutral_filter((1.0 - m).sqrt(), "s3")?)
        .add_element(Element::pbs("s3", "d3", "pm"))
        .add_element(Element::neutral_filter((1.0 - epsilon).sqrt(), "pm")?)
        .add_element(Element::beam_splitter(FRAC_1_SQRT_2, FRAC_1_SQRT_2, "pm", "out", "bb")?)
        .add_element(Element::block("bb"));

    c.add_sink("out");
    Ok(c)
}
