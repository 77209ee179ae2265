use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{C, EPSILON_0};
use crate::error::{Error, Result};

/// How an "x per cm" absorption figure maps onto n''.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LossConvention {
    /// Intensity transmission over 1 cm is `1 - x`: exp(-2 n'' ω L / c).
    #[default]
    Intensity,
    /// Field amplitude over 1 cm is `1 - x`: exp(-n'' ω L / c).
    Amplitude,
}

const LOSS_REFERENCE_LENGTH: f64 = 1e-2;

fn check_nonzero(eps: Complex64) -> Result<()> {
    if eps == Complex64::new(0.0, 0.0) || !eps.is_finite() {
        return Err(Error::Singular(format!("permittivity {eps} has no local-field factor")));
    }
    Ok(())
}

/// Local-field correction (2 / 9ε₀)(ε - 1)/ε.
pub fn local_field(eps: Complex64) -> Result<Complex64> {
    check_nonzero(eps)?;
    Ok(2.0 / (9.0 * EPSILON_0) * (eps - 1.0) / eps)
}

/// Absorption enhancement factor A = 1 - (4i/9) ε'' (ε - 1)/ε.
pub fn noise_factor(eps: Complex64) -> Result<Complex64> {
    check_nonzero(eps)?;
    let shift = Complex64::new(0.0, 4.0 / 9.0) * eps.im * (eps - 1.0) / eps;
    Ok(Complex64::new(1.0, 0.0) - shift)
}

/// |A|⁴ - 1, evaluated without cancellation for tiny absorption.
pub fn a_factor_gain(eps: Complex64) -> Result<f64> {
    let a = noise_factor(eps)? - 1.0;
    let excess = 2.0 * a.re + a.norm_sqr(); // |A|² - 1
    Ok(excess * (excess + 2.0))
}

/// n'' that produces a fractional loss `fraction` per centimetre at `omega`.
pub fn n_imag_from_loss(fraction: f64, omega: f64, convention: LossConvention) -> Result<f64> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::validation(
            "loss_per_cm",
            format!("{fraction} must lie in [0, 1)"),
        ));
    }
    if !(omega > 0.0) {
        return Err(Error::validation("omega", "must be positive"));
    }
    let attenuation = -(1.0 - fraction).ln() * C / (omega * LOSS_REFERENCE_LENGTH);
    Ok(match convention {
        LossConvention::Intensity => attenuation / 2.0,
        LossConvention::Amplitude => attenuation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn local_field_values() {
        assert_eq!(local_field(Complex64::new(1.0, 0.0)).unwrap(), Complex64::new(0.0, 0.0));
        let pre = 2.0 / (9.0 * EPSILON_0);
        let l = local_field(Complex64::new(2.7889, 0.0)).unwrap();
        assert_relative_eq!(l.re / pre, 0.64144, epsilon = 1e-5);
        let l = local_field(Complex64::new(3.0625, 0.0)).unwrap();
        assert_relative_eq!(l.re / pre, 0.67347, epsilon = 1e-5);
        assert!(matches!(local_field(Complex64::new(0.0, 0.0)), Err(Error::Singular(_))));
        assert!(noise_factor(Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn lossless_factor_is_exactly_one() {
        for eps in [1.0, 2.7889, 3.0625] {
            let a = noise_factor(Complex64::new(eps, 0.0)).unwrap();
            assert_eq!(a, Complex64::new(1.0, 0.0));
            assert_eq!(a_factor_gain(Complex64::new(eps, 0.0)).unwrap(), 0.0);
        }
    }

    #[test]
    fn absorbing_bbo_value() {
        let n = Complex64::new(1.67, 1e-3);
        let a = noise_factor(n * n).unwrap();
        // ε = 2.788899 + 0.00334i, (ε-1)/ε from an independent hand expansion
        let eps = n * n;
        let ratio = 1.0 - 1.0 / eps;
        let expected = 1.0 - Complex64::new(0.0, 4.0 / 9.0 * eps.im) * ratio;
        assert_relative_eq!(a.re, expected.re, epsilon = 1e-15);
        assert_relative_eq!(a.re - 1.0, 6.4e-7, max_relative = 2e-2);
        assert_relative_eq!(a.im, -9.52e-4, max_relative = 1e-3);
    }

    #[test]
    fn ten_percent_per_cm() {
        let omega = 3.54e15;
        for (conv, expected_n) in [
            (LossConvention::Intensity, 4.46e-7),
            (LossConvention::Amplitude, 8.92e-7),
        ] {
            let ni = n_imag_from_loss(0.1, omega, conv).unwrap();
            assert_relative_eq!(ni, expected_n, max_relative = 2e-3);
            let n = Complex64::new(1.67, ni);
            let g = a_factor_gain(n * n).unwrap();
            assert!((1e-13..=1e-11).contains(&g), "{conv:?}: {g:e}");
        }
        assert!(n_imag_from_loss(1.0, omega, LossConvention::Intensity).is_err());
    }

    proptest! {
        #[test]
        fn gain_matches_direct_evaluation(nr in 1.0f64..3.0, ni in 1e-4f64..1e-1) {
            let eps = Complex64::new(nr, ni).powi(2);
            let direct = noise_factor(eps).unwrap().norm().powi(4) - 1.0;
            let stable = a_factor_gain(eps).unwrap();
            prop_assert!((direct - stable).abs() <= 1e-12 * direct.abs().max(1e-3));
        }

        #[test]
        fn imaginary_part_linear_in_absorption(nr in 1.1f64..3.0, ni in 1e-9f64..1e-6) {
            let a1 = noise_factor(Complex64::new(nr, ni).powi(2)).unwrap();
            let a2 = noise_factor(Complex64::new(nr, 2.0 * ni).powi(2)).unwrap();
            prop_assert!((a2.im / a1.im - 2.0).abs() < 1e-5);
        }
    }
}
