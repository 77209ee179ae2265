use nalgebra::Matrix2;
use num_complex::Complex64;

use twofloat::{consts::TAU, TwoFloat};

use super::config::ExperimentConfig;
use super::phase::{phase_terms, sinc};
use crate::error::{Error, Result};
use crate::green::{unit_contractions, unit_dyads, Chi2Type};
use crate::optics::{fresnel, kinematics, FresnelSet, ModeKinematics, Polarization, Transverse};
use crate::quadrature::Abscissa;

const TE: usize = 0;
const TM: usize = 1;

/// t¹²_TEM t²³_σ t²³_σ' M_TEM M_σ M_σ' (1 + r²³_TEM r²¹_σ r²¹_σ' e^{iΣkL}).
pub fn x_factor(
    sigma: Polarization,
    sigma_prime: Polarization,
    fres_p: &FresnelSet,
    fres_s: &FresnelSet,
    fres_i: &FresnelSet,
    sigma_k: Complex64,
    length: f64,
) -> Result<Complex64> {
    if fres_p.polarization != Polarization::Tem || fres_s.polarization != sigma || fres_i.polarization != sigma_prime {
        return Err(Error::usage("Fresnel sets do not match the requested polarizations"));
    }
    Ok(x_unchecked(fres_p, fres_s, fres_i, sigma_k, length))
}

fn x_unchecked(p: &FresnelSet, s: &FresnelSet, i: &FresnelSet, sigma_k: Complex64, length: f64) -> Complex64 {
    let echo = p.r23 * s.r21 * i.r21 * (Complex64::i() * sigma_k * length).exp();
    p.t * s.t * i.t * p.m * s.m * i.m * (1.0 + echo)
}

/// Per-configuration quantities shared by every k⊥.
pub(crate) struct Resolved {
    n_s: Complex64,
    n_i: Complex64,
    omega_s: f64,
    omega_i: f64,
    pump: ModeKinematics,
    pump_fresnel: FresnelSet,
    length: f64,
    z_s: f64,
    z_i: f64,
    pub(crate) kind: Chi2Type,
    pub(crate) offset: Transverse,
}

impl Resolved {
    pub(crate) fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let n_p = cfg.pump_index()?;
        let pump = kinematics(cfg.omega_pump(), n_p, Transverse::zeros());
        let pump_fresnel = fresnel(Polarization::Tem, &pump, n_p * n_p, cfg.crystal_length)?;
        Ok(Resolved {
            n_s: cfg.signal_index()?,
            n_i: cfg.idler_index()?,
            omega_s: cfg.omega_signal,
            omega_i: cfg.omega_idler,
            pump,
            pump_fresnel,
            length: cfg.crystal_length,
            z_s: cfg.detectors.z_signal,
            z_i: cfg.detectors.z_idler,
            kind: cfg.chi2.kind,
            offset: cfg.offset(),
        })
    }

    /// Upper end of the propagating sector.
    pub(crate) fn q_max(&self) -> f64 {
        self.omega_s.min(self.omega_i) / crate::constants::C
    }

    pub(crate) fn sector(&self, kp: f64) -> Result<Sector> {
        let mut sector = self.sector_residual(kp)?;
        sector.common *= self.detector_lag(Abscissa { base: kp, offset: 0.0 }) * self.detector_phase();
        Ok(sector)
    }

    /// e^{-i[(q_s - q_zs) z_s + (q_i - q_zi) z_i]} at |k⊥| = node.x().
    pub(crate) fn detector_lag(&self, node: Abscissa) -> Complex64 {
        let c = crate::constants::C;
        let phase = lag_phase(self.omega_s / c, self.z_s, node) + lag_phase(self.omega_i / c, self.z_i, node);
        Complex64::from_polar(1.0, -phase)
    }

    /// e^{i(q_s z_s + q_i z_i)}, the detector phase at k⊥ = 0.
    pub(crate) fn detector_phase(&self) -> Complex64 {
        let c = crate::constants::C;
        let phase = self.omega_s / c * self.z_s + self.omega_i / c * self.z_i;
        Complex64::from_polar(1.0, phase)
    }

    /// Magnitude of the phases evaluated at full |k⊥| rather than relative
    /// to a panel base [rad].
    pub(crate) fn phase_scale(&self) -> f64 {
        let c = crate::constants::C;
        let crystal = |omega: f64, n: Complex64| 4.0 * (n * omega / c).norm() * self.length;
        crystal(self.omega_s, self.n_s) + crystal(self.omega_i, self.n_i) + 2.0 * TAU.hi()
    }

    /// Sector without the detector phase.
    pub(crate) fn sector_residual(&self, kp: f64) -> Result<Sector> {
        let ks = kinematics(self.omega_s, self.n_s, Transverse::new(kp, 0.0));
        let ki = kinematics(self.omega_i, self.n_i, Transverse::new(-kp, 0.0));
        let fs = [
            fresnel(Polarization::Te, &ks, self.n_s * self.n_s, self.length)?,
            fresnel(Polarization::Tm, &ks, self.n_s * self.n_s, self.length)?,
        ];
        let fi = if ki.kz == ks.kz && self.n_i == self.n_s {
            fs
        } else {
            [
                fresnel(Polarization::Te, &ki, self.n_i * self.n_i, self.length)?,
                fresnel(Polarization::Tm, &ki, self.n_i * self.n_i, self.length)?,
            ]
        };
        let pm = phase_terms(&ks, &ki, &self.pump);
        let mut x = [[Complex64::new(0.0, 0.0); 2]; 2];
        for a in [TE, TM] {
            for b in [TE, TM] {
                x[a][b] = x_unchecked(&self.pump_fresnel, &fs[a], &fi[b], pm.sigma_k, self.length);
            }
        }
        let i = Complex64::i();
        let half = 0.5 * self.length;
        let common = sinc(pm.delta_k * half) * (i * pm.sigma_k * half).exp() / (ks.kz * ki.kz);
        Ok(Sector {
            x,
            common,
            rs: ks.kz / ks.k,
            ri: ki.kz / ki.k,
        })
    }

    pub(crate) fn detector_distances(&self) -> (f64, f64) {
        (self.z_s, self.z_i)
    }

    pub(crate) fn length(&self) -> f64 {
        self.length
    }
}

/// (q - q_z) z at |k⊥| = node.x(), reduced modulo 2π. The panel-base part
/// is evaluated in double-double arithmetic.
fn lag_phase(q: f64, z: f64, node: Abscissa) -> f64 {
    let Abscissa { base, offset } = node;
    let b = TwoFloat::from(base);
    let qq = TwoFloat::from(q);
    let qz_dd = (qq * qq - b * b).max(TwoFloat::from(0.0)).sqrt();
    let at_base = b * b / (qq + qz_dd) * z;
    let turns = (at_base.hi() / TAU.hi()).round();
    let reduced = at_base - TAU * turns;
    if offset == 0.0 {
        return reduced.hi() + reduced.lo();
    }
    let qz_of = |x: f64| (q * q - x * x).max(0.0).sqrt();
    let x = base + offset;
    let denom = qz_of(base) + qz_of(x);
    // q_z(base) - q_z(x)
    let step = if denom > 0.0 {
        offset * (2.0 * base + offset) / denom
    } else {
        0.0
    };
    reduced.hi() + reduced.lo() + step * z
}

/// Physics at one |k⊥|; the direction enters only through the dyads.
pub(crate) struct Sector {
    x: [[Complex64; 2]; 2],
    common: Complex64,
    rs: Complex64,
    ri: Complex64,
}

impl Sector {
    /// Integrand matrix at direction (c, s), without the detector-offset phase.
    pub(crate) fn matrix(&self, kind: Chi2Type, c: f64, s: f64) -> Matrix2<Complex64> {
        let dyads = unit_dyads(c, s, self.rs, self.ri);
        let contr = unit_contractions(kind, c, s, self.rs, self.ri);
        let mut out = Matrix2::zeros();
        for a in [TE, TM] {
            for b in [TE, TM] {
                if contr[a][b] != Complex64::new(0.0, 0.0) {
                    out += dyads[a][b] * (contr[a][b] * self.x[a][b]);
                }
            }
        }
        out * self.common
    }

    /// φ-average of [`Sector::matrix`]; multiplies 𝕀 for type I and J for
    /// type II.
    pub(crate) fn reduced(&self, kind: Chi2Type) -> Complex64 {
        let (rs2, ri2) = (self.rs * self.rs, self.ri * self.ri);
        let x = &self.x;
        let bracket = match kind {
            Chi2Type::I => 0.5 * (x[TE][TE] + rs2 * ri2 * x[TM][TM]),
            Chi2Type::II => 0.25 * (x[TE][TE] + rs2 * x[TM][TE] + ri2 * x[TE][TM] + rs2 * ri2 * x[TM][TM]),
        };
        bracket * self.common
    }
}

fn check_sector(res: &Resolved, k_perp: Transverse) -> Result<f64> {
    let kp = k_perp.norm();
    let q = res.q_max();
    if !(kp > 0.0 && kp < q) {
        return Err(Error::domain(format!(
            "|k⊥| = {kp:e} 1/m is outside the propagating sector (0, {q:e})"
        )));
    }
    Ok(kp)
}

/// Full k⊥ integrand of the amplitude for the configured coupling type,
/// including the detector-offset phase e^{ik⊥·(ρ_ds - ρ_di)}.
pub fn integrand(k_perp: Transverse, cfg: &ExperimentConfig) -> Result<Matrix2<Complex64>> {
    let res = Resolved::new(cfg)?;
    let kp = check_sector(&res, k_perp)?;
    let sector = res.sector(kp)?;
    let phase = (Complex64::i() * k_perp.dot(&res.offset)).exp();
    Ok(sector.matrix(res.kind, k_perp.x / kp, k_perp.y / kp) * phase)
}

pub fn integrand_type_i(k_perp: Transverse, cfg: &ExperimentConfig) -> Result<Matrix2<Complex64>> {
    integrand(k_perp, &cfg.with_type(Chi2Type::I))
}

pub fn integrand_type_ii(k_perp: Transverse, cfg: &ExperimentConfig) -> Result<Matrix2<Complex64>> {
    integrand(k_perp, &cfg.with_type(Chi2Type::II))
}

/// Azimuthal average of the integrand at |k⊥| = `k_perp` for collinear
/// detectors: the coefficient of 𝕀 (type I) or J (type II).
pub fn reduced_integrand(k_perp: f64, cfg: &ExperimentConfig) -> Result<Complex64> {
    let res = Resolved::new(cfg)?;
    if !cfg.is_collinear() {
        return Err(Error::usage(
            "the reduced integrand assumes zero transverse detector offset",
        ));
    }
    let kp = check_sector(&res, Transverse::new(k_perp, 0.0))?;
    Ok(res.sector(kp)?.reduced(res.kind))
}
