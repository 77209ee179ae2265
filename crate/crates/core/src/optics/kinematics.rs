use nalgebra::Vector2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::C;

/// Transverse wave vector (k_x, k_y) [1/m].
pub type Transverse = Vector2<f64>;

/// Wave-vector data of one plane-wave mode inside and outside the crystal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeKinematics {
    pub omega: f64,
    /// In-crystal wave number n ω / c.
    pub k: Complex64,
    pub kz: Complex64,
    /// Vacuum wave number ω / c.
    pub q: f64,
    pub qz: Complex64,
    pub k_perp: [f64; 2],
}

impl ModeKinematics {
    pub fn k_perp(&self) -> Transverse {
        Transverse::new(self.k_perp[0], self.k_perp[1])
    }

    pub fn k_perp_norm(&self) -> f64 {
        self.k_perp[0].hypot(self.k_perp[1])
    }

    /// Refractive index recovered from k / q.
    pub fn index(&self) -> Complex64 {
        self.k / self.q
    }
}

/// Square root on the branch with non-negative imaginary part.
///
/// Real positive radicands give the non-negative real root, real negative
/// radicands give a positive imaginary root.
pub fn upper_sqrt(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        return if z.re >= 0.0 {
            Complex64::new(z.re.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-z.re).sqrt())
        };
    }
    let r = z.sqrt();
    if r.im < 0.0 {
        -r
    } else {
        r
    }
}

/// Builds the mode data for angular frequency `omega` in a medium of index `n`.
pub fn kinematics(omega: f64, n: Complex64, k_perp: Transverse) -> ModeKinematics {
    debug_assert!(omega > 0.0, "angular frequency must be positive");
    let q = omega / C;
    let k = n * q;
    let kp2 = k_perp.norm_squared();
    let (kz, qz) = if kp2 == 0.0 {
        (k, Complex64::new(q, 0.0))
    } else {
        (upper_sqrt(k * k - kp2), upper_sqrt(Complex64::new(q * q - kp2, 0.0)))
    };
    ModeKinematics {
        omega,
        k,
        kz,
        q,
        qz,
        k_perp: [k_perp.x, k_perp.y],
    }
}
