use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::optics::ModeKinematics;

/// Longitudinal phase mismatch Δk and phase sum Σk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseMatch {
    pub delta_k: Complex64,
    pub sigma_k: Complex64,
}

pub fn phase_terms(kin_s: &ModeKinematics, kin_i: &ModeKinematics, kin_p: &ModeKinematics) -> PhaseMatch {
    let kz = kin_s.kz + kin_i.kz;
    PhaseMatch {
        delta_k: kin_p.kz - kz,
        sigma_k: kin_p.kz + kz,
    }
}

/// sin z / z with the removable singularity filled in.
pub fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// |sinc(ΔkL/2) e^{iΣkL/2}|².
pub fn sinc_profile(pm: &PhaseMatch, length: f64) -> f64 {
    let s = sinc(pm.delta_k * (0.5 * length)).norm_sqr();
    s * (-pm.sigma_k.im * length).exp()
}
