use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::{fresnel, kinematics, FresnelSet, ModeKinematics, Polarization, Transverse};
use crate::quadrature::{integrate_radial_with, try_integrate_angular, QuadratureSpec, RadialHints, EVANESCENT_CUTOFF};

/// A homogeneous slab occupying |z| ≤ L/2 in vacuum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrystalSlab {
    pub eps: Complex64,
    pub length: f64,
}

impl CrystalSlab {
    pub fn vacuum(length: f64) -> Self {
        CrystalSlab {
            eps: Complex64::new(1.0, 0.0),
            length,
        }
    }

    fn index(&self) -> Complex64 {
        let n = self.eps.sqrt();
        if n.im < 0.0 {
            -n
        } else {
            n
        }
    }
}

/// z-dependent transmission factor from a source at `z_a` inside the slab
/// to a detector at `z_d` beyond the output face.
pub fn f_factor(
    pol: Polarization,
    z_d: f64,
    z_a: f64,
    kin: &ModeKinematics,
    fres: &FresnelSet,
    length: f64,
) -> Result<Complex64> {
    if pol == Polarization::Tem || fres.polarization != pol {
        return Err(Error::usage("f_factor needs a matching TE or TM Fresnel set"));
    }
    let half = 0.5 * length;
    if !(z_a.abs() <= half) {
        return Err(Error::domain(format!("source z = {z_a:e} m lies outside the crystal")));
    }
    if !(z_d > half) {
        return Err(Error::domain(format!(
            "detector z = {z_d:e} m is not beyond the output face"
        )));
    }
    let i = Complex64::i();
    let kz = kin.kz;
    let bracket = (-i * kz * z_a).exp() + fres.r21 * (i * kz * (z_a + length)).exp();
    Ok(fres.t * (i * kin.qz * (z_d - half)).exp() * (i * kz * half).exp() * bracket * fres.m)
}

/// Transmission Green tensor G(r_d, r_a, ω) by angular-spectrum quadrature,
/// including the evanescent sector.
pub fn scattering_green_point(
    r_d: Vector3<f64>,
    r_a: Vector3<f64>,
    omega: f64,
    slab: &CrystalSlab,
    spec: &QuadratureSpec,
) -> Result<Matrix3<Complex64>> {
    let half = 0.5 * slab.length;
    if !(slab.length > 0.0) {
        return Err(Error::validation("crystal_length", "must be positive"));
    }
    if !(r_a.z.abs() <= half) {
        return Err(Error::domain("source point lies outside the crystal"));
    }
    if !(r_d.z > half) {
        return Err(Error::domain("detector point is not beyond the output face"));
    }
    if !(omega > 0.0) {
        return Err(Error::validation("omega", "must be positive"));
    }
    let n = slab.index();
    let q = kinematics(omega, n, Transverse::zeros()).q;
    let offset = Transverse::new(r_d.x - r_a.x, r_d.y - r_a.y);
    let rho = offset.norm();
    let angular_spec = QuadratureSpec {
        rel_tol: spec.rel_tol * 1e-2,
        abs_floor: 0.0,
        ..*spec
    };
    let i = Complex64::i();

    // ∫dφ e^{ik⊥·Δρ} [ê_TE ê_TE F_TE + (N⊗N / k⊥²) F_TM] at fixed |k⊥|
    let sector = |kp: f64| -> Result<(Matrix3<Complex64>, Complex64)> {
        let kin = kinematics(omega, n, Transverse::new(kp, 0.0));
        let te = fresnel(Polarization::Te, &kin, slab.eps, slab.length)?;
        let tm = fresnel(Polarization::Tm, &kin, slab.eps, slab.length)?;
        let f_te = f_factor(Polarization::Te, r_d.z, r_a.z, &kin, &te, slab.length)?;
        let f_tm = f_factor(Polarization::Tm, r_d.z, r_a.z, &kin, &tm, slab.length)?;
        let (kz, k) = (kin.kz, kin.k);
        let ang = try_integrate_angular(
            |az| {
                let (c, s) = (az.cos, az.sin);
                let re = |v: f64| Complex64::new(v, 0.0);
                let d_te = Matrix3::new(
                    re(s * s),
                    re(-c * s),
                    re(0.0),
                    re(-c * s),
                    re(c * c),
                    re(0.0),
                    re(0.0),
                    re(0.0),
                    re(0.0),
                );
                let v = Vector3::new(kz * c, kz * s, re(-kp));
                let d_tm = v * v.transpose() / (k * k);
                let phase = (i * kp * (c * offset.x + s * offset.y)).exp();
                Ok((d_te * f_te + d_tm * f_tm) * phase)
            },
            &angular_spec,
        )?;
        Ok((ang.value, kz))
    };

    let gap = r_d.z - half;
    let depth = half - r_a.z;
    // longitudinal components are floored where k⊥ rounds onto the branch point
    let floor = 1e-8 * q;
    let freq =
        move |kp: f64, qz: f64, kz: f64| kp * (gap / qz.max(floor) + (depth + 2.0 * slab.length) / kz.max(floor)) + rho;

    // propagating part, k⊥ ∈ [0, q]
    let prop_spec = QuadratureSpec {
        sine_map: true,
        ..*spec
    };
    let prop = integrate_radial_with(
        |kp| {
            let (m, kz) = sector(kp)?;
            Ok(m * (kp / kz))
        },
        0.0,
        q,
        &prop_spec,
        RadialHints {
            frequency: Some(&|kp: f64| {
                let kz = (n * n * q * q - kp * kp).sqrt().norm();
                freq(kp, (q * q - kp * kp).max(0.0).sqrt(), kz)
            }),
            ..Default::default()
        },
    )?;

    // evanescent in vacuum: k⊥ = sqrt(q² + κ²), k⊥ dk⊥ = κ dκ
    let evan = integrate_radial_with(
        |kappa| {
            let kp = (q * q + kappa * kappa).sqrt();
            let (m, kz) = sector(kp)?;
            Ok(m * (kappa / kz))
        },
        0.0,
        EVANESCENT_CUTOFF / gap,
        spec,
        RadialHints {
            frequency: Some(&|kappa: f64| {
                let kp = (q * q + kappa * kappa).sqrt();
                rho * kappa / kp + 2.0 * slab.length * (n * q).norm() * kappa / kp
            }),
            ..Default::default()
        },
    )?;

    Ok((prop.value + evan.value) * (i / (8.0 * PI * PI)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const OMEGA: f64 = 3.54e15;

    fn free_space(r: Vector3<f64>, q: f64) -> Matrix3<Complex64> {
        let i = Complex64::i();
        let d = r.norm();
        let u = r / d;
        let qr = q * d;
        let a = 1.0 + i / qr - 1.0 / (qr * qr);
        let b = -1.0 - 3.0 * i / qr + 3.0 / (qr * qr);
        let uu = (u * u.transpose()).map(|v| Complex64::new(v, 0.0));
        (Matrix3::identity().map(|v| Complex64::new(v, 0.0)) * a + uu * b) * ((i * qr).exp() / (4.0 * PI * d))
    }

    #[test]
    fn f_factor_vacuum_is_free_propagation() {
        let kin = kinematics(OMEGA, Complex64::new(1.0, 0.0), Transverse::new(1e6, 0.0));
        for pol in [Polarization::Te, Polarization::Tm] {
            let fres = fresnel(pol, &kin, Complex64::new(1.0, 0.0), 2e-3).unwrap();
            let f = f_factor(pol, 0.5, 3e-4, &kin, &fres, 2e-3).unwrap();
            let expected = (Complex64::i() * kin.qz * (0.5 - 3e-4)).exp();
            assert!((f - expected).norm() < 1e-9);
        }
    }

    #[test]
    fn f_factor_without_back_reflection() {
        let n = Complex64::new(1.67, 1e-6);
        let kin = kinematics(OMEGA, n, Transverse::new(2e6, 0.0));
        let mut fres = fresnel(Polarization::Te, &kin, n * n, 2e-3).unwrap();
        fres.r21 = Complex64::new(0.0, 0.0);
        let i = Complex64::i();
        let (zd, za, l) = (0.1, -2e-4, 2e-3);
        let f = f_factor(Polarization::Te, zd, za, &kin, &fres, l).unwrap();
        let direct = fres.t * (i * kin.qz * (zd - l / 2.0)).exp() * (i * kin.kz * (l / 2.0 - za)).exp() * fres.m;
        assert!((f - direct).norm() < 1e-12 * direct.norm());
    }

    #[test]
    fn f_factor_domain() {
        let kin = kinematics(OMEGA, Complex64::new(1.5, 0.0), Transverse::new(1e6, 0.0));
        let fres = fresnel(Polarization::Te, &kin, Complex64::new(2.25, 0.0), 2e-3).unwrap();
        assert!(matches!(
            f_factor(Polarization::Te, 0.5, 2e-3, &kin, &fres, 2e-3),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            f_factor(Polarization::Te, 5e-4, 0.0, &kin, &fres, 2e-3),
            Err(Error::Domain(_))
        ));
        assert!(f_factor(Polarization::Tm, 0.5, 0.0, &kin, &fres, 2e-3).is_err());
    }

    #[test]
    fn f_factor_decreases_with_absorption() {
        let mut last = f64::INFINITY;
        for ni in [0.0, 1e-6, 1e-5, 1e-4, 1e-3] {
            let n = Complex64::new(1.67, ni);
            let kin = kinematics(OMEGA, n, Transverse::new(1e6, 0.0));
            let fres = fresnel(Polarization::Te, &kin, n * n, 2e-3).unwrap();
            let f = f_factor(Polarization::Te, 0.1, -1e-3, &kin, &fres, 2e-3)
                .unwrap()
                .norm();
            assert!(f < last, "n'' = {ni}: {f} >= {last}");
            last = f;
        }
    }

    #[test]
    fn vacuum_green_matches_free_space() {
        // q (z_d - z_a) = 50 with q = 1 / m
        let slab = CrystalSlab::vacuum(0.2);
        let omega = crate::constants::C;
        let spec = QuadratureSpec::with_tolerance(1e-7);
        let r_a = Vector3::new(0.0, 0.0, 0.0);
        let r_d = Vector3::new(0.0, 0.0, 50.0);
        let g = scattering_green_point(r_d, r_a, omega, &slab, &spec).unwrap();
        let g0 = free_space(r_d - r_a, 1.0);
        assert!((g - g0).norm() < 1e-4 * g0.norm(), "{g}\n{g0}");
        assert!(g[(0, 1)].norm() < 1e-8 * g0.norm());
    }
}
