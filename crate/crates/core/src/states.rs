//! Closed-form constructors for the maximally discordant mixed-state family
//! and its rank-2 and rank-3 subfamilies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::{Polarization, SpinOrbitKet, TransverseMode};
use crate::qmath::{ComplexMatrix, DensityMatrix4};

/// `p`: Bell imbalance, `m`: weight of |01⟩ in the product part,
/// `epsilon`: weight of the coherent part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateParams {
    pub p: f64,
    pub m: f64,
    pub epsilon: f64,
}

impl StateParams {
    pub fn new(p: f64, m: f64, epsilon: f64) -> Result<Self> {
        let params = Self { p, m, epsilon };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("p", self.p)?;
        check_probability("m", self.m)?;
        check_probability("epsilon", self.epsilon)
    }
}

pub(crate) fn check_probability(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} = {x} is outside [0, 1]")))
    }
}

/// √p|00⟩ + √(1−p)|11⟩ with real non-negative amplitudes.
pub fn partial_bell(p: f64) -> Result<SpinOrbitKet> {
    check_probability("p", p)?;
    Ok(SpinOrbitKet::from_real([p.sqrt(), 0.0, 0.0, (1.0 - p).sqrt()]))
}

/// ε|Φ⁺(p)⟩⟨Φ⁺(p)| + (1−ε)[m|01⟩⟨01| + (1−m)|10⟩⟨10|]
pub fn mdms(params: StateParams) -> Result<DensityMatrix4> {
    params.validate()?;
    let StateParams { p, m, epsilon } = params;
    let bell = partial_bell(p)?.projector();
    let hv = SpinOrbitKet::basis(Polarization::H, TransverseMode::V).projector();
    let vh = SpinOrbitKet::basis(Polarization::V, TransverseMode::H).projector();
    let mut rho = ComplexMatrix::zeros(4);
    for (w, part) in [
        (epsilon, &bell),
        ((1.0 - epsilon) * m, &hv),
        ((1.0 - epsilon) * (1.0 - m), &vh),
    ] {
        if w != 0.0 {
            rho = &rho + &part.scale_real(w);
        }
    }
    DensityMatrix4::new(rho)
}

/// ε|Φ⁺(p)⟩⟨Φ⁺(p)| + (1−ε)|01⟩⟨01|
pub fn rank2(p: f64, epsilon: f64) -> Result<DensityMatrix4> {
    mdms(StateParams::new(p, 1.0, epsilon)?)
}

/// ε|Φ⁺⟩⟨Φ⁺| + (1−ε)[m|01⟩⟨01| + (1−m)|10⟩⟨10|]
pub fn rank3(m: f64, epsilon: f64) -> Result<DensityMatrix4> {
    mdms(StateParams::new(0.5, m, epsilon)?)
}

/// Maximally entangled |Φ⁺⟩⟨Φ⁺|.
pub fn bell() -> DensityMatrix4 {
    rank2(0.5, 1.0).expect("constant parameters are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::validate_density;
    use proptest::prelude::*;

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn partial_bell_examples() {
        assert_eq!(partial_bell(0.5).unwrap(), SpinOrbitKet::from_real([S, 0.0, 0.0, S]));
        assert_eq!(
            partial_bell(1.0).unwrap(),
            SpinOrbitKet::from_real([1.0, 0.0, 0.0, 0.0])
        );
        let k = partial_bell(0.25).unwrap();
        assert_eq!(k, SpinOrbitKet::from_real([0.5, 0.0, 0.0, 0.75f64.sqrt()]));
        assert!(partial_bell(1.5).is_err());
        assert!(partial_bell(-0.1).is_err());
    }

    #[test]
    fn mdms_examples() {
        let a = mdms(StateParams::new(0.5, 1.0, 0.3).unwrap()).unwrap();
        assert_eq!(a, rank2(0.5, 0.3).unwrap());

        let p = 0.37;
        let pure = mdms(StateParams::new(p, 0.6, 1.0).unwrap()).unwrap();
        let expected = partial_bell(p).unwrap().projector();
        assert!(pure.matrix().max_abs_diff(&expected) < 1e-15);

        let d = mdms(StateParams::new(0.5, 0.5, 0.0).unwrap()).unwrap();
        assert_eq!(*d.matrix(), ComplexMatrix::from_real_diagonal(&[0.0, 0.5, 0.5, 0.0]));

        assert!(StateParams::new(0.5, 1.2, 0.3).is_err());
    }

    #[test]
    fn rank2_examples() {
        let b = rank2(0.5, 1.0).unwrap();
        let ev = b.eigenvalues();
        assert!((ev[0] - 1.0).abs() < 1e-14 && ev[1..].iter().all(|l| l.abs() < 1e-14));

        let z = rank2(0.5, 0.0).unwrap();
        assert_eq!(*z.matrix(), ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 0.0, 0.0]));

        // orthogonal pure components with weight ½ each
        let ev = rank2(0.5, 0.5).unwrap().eigenvalues();
        let expected = [0.5, 0.5, 0.0, 0.0];
        for (l, e) in ev.iter().zip(expected) {
            assert!((l - e).abs() < 1e-14);
        }
    }

    #[test]
    fn rank3_examples() {
        let r = rank3(0.25, 0.0).unwrap();
        assert_eq!(*r.matrix(), ComplexMatrix::from_real_diagonal(&[0.0, 0.25, 0.75, 0.0]));

        assert!(rank3(0.3, 1.0).unwrap().matrix().max_abs_diff(bell().matrix()) < 1e-15);

        let ev = rank3(0.5, 1.0 / 3.0).unwrap().eigenvalues();
        let third = 1.0 / 3.0;
        for (l, e) in ev.iter().zip([third, third, third, 0.0]) {
            assert!((l - e).abs() < 1e-14);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn constructors_yield_valid_states(p in 0.0f64..=1.0, m in 0.0f64..=1.0, eps in 0.0f64..=1.0) {
            let params = StateParams::new(p, m, eps).unwrap();
            prop_assert!(validate_density(mdms(params).unwrap().matrix(), 1e-12).valid);
            prop_assert!(validate_density(rank2(p, eps).unwrap().matrix(), 1e-12).valid);
            prop_assert!(validate_density(rank3(m, eps).unwrap().matrix(), 1e-12).valid);
        }

        #[test]
        fn families_agree_with_general_constructor(p in 0.0f64..=1.0, m in 0.0f64..=1.0, eps in 0.0f64..=1.0) {
            let a = mdms(StateParams::new(p, 1.0, eps).unwrap()).unwrap();
            prop_assert!(a.matrix().max_abs_diff(rank2(p, eps).unwrap().matrix()) <= 1e-15);
            let b = mdms(StateParams::new(0.5, m, eps).unwrap()).unwrap();
            prop_assert!(b.matrix().max_abs_diff(rank3(m, eps).unwrap().matrix()) <= 1e-15);
        }

        #[test]
        fn rank_structure(p in 0.0f64..=1.0, m in 0.0f64..=1.0, eps in 0.0f64..=1.0) {
            prop_assert!(rank2(p, eps).unwrap().rank(1e-10) <= 2);
            prop_assert!(rank3(m, eps).unwrap().rank(1e-10) <= 3);
        }
    }

    #[test]
    fn rank3_subset_sweeps() {
        // m ∈ [0,1], ε ∈ [0,⅓] and m = ½ with ε ∈ [⅓, 0.385]: rank never exceeds 3.
        for i in 0..=20 {
            for j in 0..=20 {
                let m = i as f64 / 20.0;
                let eps = j as f64 / 60.0;
                assert!(rank3(m, eps).unwrap().rank(1e-10) <= 3);
            }
        }
        for j in 0..=20 {
            let eps = 1.0 / 3.0 + (0.385 - 1.0 / 3.0) * j as f64 / 20.0;
            assert!(rank3(0.5, eps).unwrap().rank(1e-10) <= 3);
        }
    }
}
