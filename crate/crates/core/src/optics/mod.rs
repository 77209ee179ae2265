//! Linear optics of the crystal: dispersion data, per-mode wave vectors,
//! interface coefficients and the absorption-induced noise factor.

mod dispersion;
mod fresnel;
mod kinematics;
mod noise;

pub use dispersion::{dispersion_eval, DispersionSample, MaterialDispersion};
pub use fresnel::{fresnel, FresnelSet, Polarization};
pub use kinematics::{kinematics, upper_sqrt, ModeKinematics, Transverse};
pub use noise::{a_factor_gain, local_field, n_imag_from_loss, noise_factor, LossConvention};

use std::f64::consts::PI;

use crate::constants::C;

/// Vacuum wavelength [m] to angular frequency [rad/s].
pub fn omega_from_wavelength(lambda: f64) -> f64 {
    2.0 * PI * C / lambda
}

/// Angular frequency [rad/s] to vacuum wavelength [m].
pub fn wavelength_from_omega(omega: f64) -> f64 {
    2.0 * PI * C / omega
}
