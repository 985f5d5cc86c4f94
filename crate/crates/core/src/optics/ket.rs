use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::qmath::{ComplexMatrix, C64, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

/// First-order transverse mode: `h` is HG₀₁, `v` is HG₁₀.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransverseMode {
    #[serde(rename = "h")]
    H,
    #[serde(rename = "v")]
    V,
}

impl Polarization {
    pub fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }
}

impl TransverseMode {
    pub fn index(self) -> usize {
        match self {
            TransverseMode::H => 0,
            TransverseMode::V => 1,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::H => "H",
            Polarization::V => "V",
        })
    }
}

impl fmt::Display for TransverseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransverseMode::H => "h",
            TransverseMode::V => "v",
        })
    }
}

impl FromStr for Polarization {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "H" => Ok(Polarization::H),
            "V" => Ok(Polarization::V),
            _ => Err(format!("expected polarization H or V, got `{s}`")),
        }
    }
}

impl FromStr for TransverseMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "h" => Ok(TransverseMode::H),
            "v" => Ok(TransverseMode::V),
            _ => Err(format!("expected transverse mode h or v, got `{s}`")),
        }
    }
}

/// Amplitudes over {|Hh⟩,|Hv⟩,|Vh⟩,|Vv⟩}. Sub-normalized kets carry filter
/// losses: the squared norm is the survival probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinOrbitKet(pub [C64; 4]);

impl SpinOrbitKet {
    pub const ZERO: SpinOrbitKet = SpinOrbitKet([ZERO; 4]);

    pub fn new(amplitudes: [C64; 4]) -> Self {
        Self(amplitudes)
    }

    pub fn from_real(amplitudes: [f64; 4]) -> Self {
        Self(amplitudes.map(|a| C64::new(a, 0.0)))
    }

    pub fn basis(pol: Polarization, mode: TransverseMode) -> Self {
        let mut a = [ZERO; 4];
        a[Self::index(pol, mode)] = C64::new(1.0, 0.0);
        Self(a)
    }

    pub fn index(pol: Polarization, mode: TransverseMode) -> usize {
        2 * pol.index() + mode.index()
    }

    pub fn amplitude(&self, pol: Polarization, mode: TransverseMode) -> C64 {
        self.0[Self::index(pol, mode)]
    }

    pub fn amplitudes(&self) -> &[C64; 4] {
        &self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| Self(self.0.map(|z| z / n)))
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> C64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::projector(&self.0)
    }

    /// Applies `j` (2x2, row-major) to the polarization qubit.
    pub fn apply_polarization(&self, j: &[[C64; 2]; 2]) -> Self {
        let a = &self.0;
        let mut out = [ZERO; 4];
        for m in 0..2 {
            for p in 0..2 {
                out[2 * p + m] = j[p][0] * a[m] + j[p][1] * a[2 + m];
            }
        }
        Self(out)
    }

    /// Applies `j` (2x2, row-major) to the transverse-mode qubit.
    pub fn apply_mode(&self, j: &[[C64; 2]; 2]) -> Self {
        let a = &self.0;
        let mut out = [ZERO; 4];
        for p in 0..2 {
            for m in 0..2 {
                out[2 * p + m] = j[m][0] * a[2 * p] + j[m][1] * a[2 * p + 1];
            }
        }
        Self(out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for SpinOrbitKet {
    type Output = SpinOrbitKet;
    fn add(self, rhs: Self) -> Self {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        Self(out)
    }
}

impl Mul<C64> for SpinOrbitKet {
    type Output = SpinOrbitKet;
    fn mul(self, rhs: C64) -> Self {
        Self(self.0.map(|z| z * rhs))
    }
}

impl Mul<f64> for SpinOrbitKet {
    type Output = SpinOrbitKet;
    fn mul(self, rhs: f64) -> Self {
        Self(self.0.map(|z| z * rhs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_indices_follow_global_order() {
        use Polarization::*;
        assert_eq!(SpinOrbitKet::index(H, TransverseMode::H), 0);
        assert_eq!(SpinOrbitKet::index(H, TransverseMode::V), 1);
        assert_eq!(SpinOrbitKet::index(V, TransverseMode::H), 2);
        assert_eq!(SpinOrbitKet::index(V, TransverseMode::V), 3);
    }

    #[test]
    fn local_operators_act_on_the_right_factor() {
        let x = [[ZERO, C64::new(1.0, 0.0)], [C64::new(1.0, 0.0), ZERO]];
        let hh = SpinOrbitKet::basis(Polarization::H, TransverseMode::H);
        assert_eq!(
            hh.apply_polarization(&x),
            SpinOrbitKet::basis(Polarization::V, TransverseMode::H)
        );
        assert_eq!(
            hh.apply_mode(&x),
            SpinOrbitKet::basis(Polarization::H, TransverseMode::V)
        );
    }
}
