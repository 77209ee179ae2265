use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ModeKinematics;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    Te,
    Tm,
    /// Normally incident pump.
    Tem,
}

/// Interface and multiple-scattering coefficients of one mode.
///
/// `r21` reflects at the input face from inside, `r23` at the output face.
/// `t` is the exit transmission for TE/TM and the entry transmission for
/// the TEM pump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FresnelSet {
    pub r21: Complex64,
    pub r23: Complex64,
    pub t: Complex64,
    pub m: Complex64,
    pub polarization: Polarization,
}

/// Fresnel set for a slab of permittivity `eps` and thickness `length`
/// surrounded by vacuum.
///
/// The TM exit coefficient is the electric-field ratio
/// `2 n k_z / (k_z + eps q_z)`; it reduces to `2n/(n+1)` at normal incidence
/// like its TE counterpart.
pub fn fresnel(pol: Polarization, kin: &ModeKinematics, eps: Complex64, length: f64) -> Result<FresnelSet> {
    let one = Complex64::new(1.0, 0.0);
    let n = kin.index();
    let (r, t, kz) = match pol {
        Polarization::Te => {
            let denom = kin.kz + kin.qz;
            ((kin.kz - kin.qz) / denom, 2.0 * kin.kz / denom, kin.kz)
        }
        Polarization::Tm => {
            let denom = kin.kz + eps * kin.qz;
            ((kin.kz - eps * kin.qz) / denom, 2.0 * n * kin.kz / denom, kin.kz)
        }
        Polarization::Tem => {
            if kin.k_perp != [0.0, 0.0] {
                return Err(Error::usage("TEM coefficients are defined for normal incidence only"));
            }
            ((n - 1.0) / (n + 1.0), 2.0 / (n + 1.0), kin.k)
        }
    };
    let round_trip = (Complex64::i() * 2.0 * kz * length).exp();
    let m = one / (one - r * r * round_trip);
    if !(r.is_finite() && t.is_finite() && m.is_finite()) {
        return Err(Error::Singular(format!("{pol:?} Fresnel coefficients diverge")));
    }
    Ok(FresnelSet {
        r21: r,
        r23: r,
        t,
        m,
        polarization: pol,
    })
}
