use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::integrand::{x_factor, Resolved};
use super::phase::{phase_terms, sinc};
use crate::constants::{C, EPSILON_0, HBAR};
use crate::error::{Error, Result};
use crate::green::Chi2Type;
use crate::optics::{fresnel, kinematics, noise_factor, Polarization, Transverse};
use crate::quadrature::{integrate_radial_split, try_integrate_angular, Abscissa, QuadratureSpec, RadialHints};

/// Two-photon detection amplitude A_λμ over transverse polarizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiphotonAmplitude {
    pub matrix: Matrix2<Complex64>,
    pub rate: f64,
    /// Estimated absolute quadrature error of the largest entry (0 for
    /// closed forms).
    pub error: f64,
}

impl BiphotonAmplitude {
    pub fn new(matrix: Matrix2<Complex64>) -> Self {
        BiphotonAmplitude {
            matrix,
            rate: matrix.iter().map(|a| a.norm_sqr()).sum(),
            error: 0.0,
        }
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> [f64; 2] {
        let sv = self.matrix.singular_values();
        [sv[0].max(sv[1]), sv[0].min(sv[1])]
    }
}

/// Coincidence rate Σ|A_λμ|².
pub fn rate(amp: &BiphotonAmplitude) -> f64 {
    amp.matrix.iter().map(|a| a.norm_sqr()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Method {
    #[default]
    FarField,
    Numeric,
}

pub fn amplitude(cfg: &ExperimentConfig, method: Method, tol: f64) -> Result<BiphotonAmplitude> {
    match method {
        Method::FarField => amplitude_farfield(cfg),
        Method::Numeric => amplitude_numeric(cfg, tol),
    }
}

/// ħE_pL/(4πiε₀) (ω_s²ω_i²/c⁴) e^{iq_pz_p} d A*(ω_s) A*(ω_i).
fn prefactor(cfg: &ExperimentConfig) -> Result<Complex64> {
    let (ws, wi) = (cfg.omega_signal, cfg.omega_idler);
    let ns = cfg.signal_index()?;
    let ni = cfg.idler_index()?;
    let a_s = noise_factor(ns * ns)?.conj();
    let a_i = noise_factor(ni * ni)?.conj();
    let scale = HBAR * cfg.pump.amplitude * cfg.crystal_length / (4.0 * PI * EPSILON_0)
        * (ws * ws / (C * C))
        * (wi * wi / (C * C))
        * cfg.chi2.strength;
    let pump_phase = (Complex64::i() * cfg.omega_pump() / C * cfg.pump.distance).exp();
    Ok(Complex64::new(0.0, -scale) * pump_phase * a_s * a_i)
}

fn structure(kind: Chi2Type, a: Complex64) -> Matrix2<Complex64> {
    let z = Complex64::new(0.0, 0.0);
    match kind {
        Chi2Type::I => Matrix2::new(a, z, z, a),
        Chi2Type::II => Matrix2::new(z, a, a, z),
    }
}

/// Amplitude by 2-D quadrature over the propagating k⊥ disc.
pub fn amplitude_numeric(cfg: &ExperimentConfig, tol: f64) -> Result<BiphotonAmplitude> {
    let res = Resolved::new(cfg)?;
    let pref = prefactor(cfg)?;
    let spec = QuadratureSpec {
        rel_tol: tol,
        abs_floor: 0.0,
        max_subdivisions: 1 << 24,
        sine_map: true,
    };
    spec.validate()?;
    let angular_spec = QuadratureSpec {
        rel_tol: (tol * 1e-3).max(1e-14),
        ..spec
    };
    let offset = res.offset;
    let kind = res.kind;
    let i = Complex64::i();
    let radial = |node: Abscissa| -> Result<Matrix2<Complex64>> {
        let kp = node.x();
        if kp == 0.0 {
            return Ok(Matrix2::zeros());
        }
        let sector = res.sector_residual(kp)?;
        let lag = res.detector_lag(node);
        let ang = if offset == Transverse::zeros() {
            structure(kind, sector.reduced(kind) * (2.0 * PI))
        } else {
            try_integrate_angular(
                |a| {
                    let phase = (i * kp * (a.cos * offset.x + a.sin * offset.y)).exp();
                    Ok(sector.matrix(kind, a.cos, a.sin) * phase)
                },
                &angular_spec,
            )?
            .value
        };
        Ok(ang * (lag * (kp / (4.0 * PI * PI))))
    };

    let (z_s, z_i) = res.detector_distances();
    let length = res.length();
    let (qs, qi) = (cfg.omega_signal / C, cfg.omega_idler / C);
    let (ks, ki) = (cfg.signal_index()?.norm() * qs, cfg.idler_index()?.norm() * qi);
    let rho = offset.norm();
    let long = |q: f64, kp: f64| (q * q - kp * kp).max(0.0).sqrt().max(1e-8 * q);
    let freq = move |kp: f64| {
        kp * (z_s / long(qs, kp) + z_i / long(qi, kp) + 3.0 * length * (1.0 / long(ks, kp) + 1.0 / long(ki, kp))) + rho
    };
    let scale = res.phase_scale();
    let phase = move |_: f64| scale;
    let hints = RadialHints {
        frequency: Some(&freq),
        phase: Some(&phase),
    };
    let est = integrate_radial_split(radial, 0.0, res.q_max(), &spec, hints)?;
    let pref = pref * res.detector_phase();
    let mut amp = BiphotonAmplitude::new(est.value * pref);
    amp.error = est.error * pref.norm();
    Ok(amp)
}

/// Leading-order stationary-phase amplitude for degenerate, collinear
/// detection.
pub fn amplitude_farfield(cfg: &ExperimentConfig) -> Result<BiphotonAmplitude> {
    cfg.validate()?;
    if !cfg.is_degenerate() || !cfg.is_collinear() {
        return Err(Error::usage(
            "the far-field form needs degenerate frequencies and collinear detectors; use the numeric method",
        ));
    }
    let omega = cfg.omega_signal;
    let length = cfg.crystal_length;
    let n = cfg.signal_index()?;
    let n_p = cfg.pump_index()?;
    let eps = n * n;
    let kin = kinematics(omega, n, Transverse::zeros());
    let kin_p = kinematics(cfg.omega_pump(), n_p, Transverse::zeros());
    let te = fresnel(Polarization::Te, &kin, eps, length)?;
    let tm = fresnel(Polarization::Tm, &kin, eps, length)?;
    let tem = fresnel(Polarization::Tem, &kin_p, n_p * n_p, length)?;
    let pm = phase_terms(&kin, &kin, &kin_p);
    let x_plus = x_factor(Polarization::Te, Polarization::Te, &tem, &te, &te, pm.sigma_k, length)?;
    let x_minus = x_factor(Polarization::Te, Polarization::Tm, &tem, &te, &tm, pm.sigma_k, length)?;

    let i = Complex64::i();
    let z_sum = cfg.detectors.z_signal + cfg.detectors.z_idler;
    let a_star = noise_factor(eps)?.conj();
    let q = omega / C;
    let scale = -HBAR * cfg.pump.amplitude * length / (8.0 * PI * PI * EPSILON_0) * q * q * q * cfg.chi2.strength;
    let phase = (i * q * (2.0 * cfg.pump.distance + z_sum)).exp() / z_sum;
    let longitudinal = sinc(pm.delta_k * (0.5 * length)) * (i * pm.sigma_k * (0.5 * length)).exp();
    let base = scale / eps * phase * a_star * a_star * longitudinal;
    let entry = match cfg.chi2.kind {
        Chi2Type::I => base * x_plus,
        Chi2Type::II => base * 0.5 * (x_plus + x_minus),
    };
    Ok(BiphotonAmplitude::new(structure(cfg.chi2.kind, entry)))
}
