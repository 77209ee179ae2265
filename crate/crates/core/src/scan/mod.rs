//! Parameter sweeps over an [`ExperimentConfig`], the figure presets and
//! CSV/JSON output.

mod config;
mod emit;
mod presets;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::green::Chi2Type;
use crate::optics::{a_factor_gain, kinematics, Transverse};
use crate::pdc::{amplitude, phase_terms, sinc_profile, ExperimentConfig, Method, PhaseMatch};

pub use config::{load_config, load_scan_request};
pub use emit::{emit, Format};
pub use presets::{preset, PRESETS};

/// Version of the JSON layout written by [`emit`].
pub const SCHEMA_VERSION: u32 = 1;

/// Relative quadrature tolerance used when none is given.
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Frequency-independent n'' applied to all three fields.
    NImag,
    CrystalLength,
    /// Re(Δk) L / 2, with Im Δk and Σk taken from the base config.
    DeltaK,
    /// Degenerate ω_s = ω_i.
    Frequency,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::NImag => "n_imag",
            Axis::CrystalLength => "crystal_length",
            Axis::DeltaK => "delta_k",
            Axis::Frequency => "frequency",
        }
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Axis::NImag, Axis::CrystalLength, Axis::DeltaK, Axis::Frequency]
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::validation("axis", format!("unknown axis `{s}`")))
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Observable {
    #[serde(rename = "rate_I")]
    RateI,
    #[serde(rename = "rate_II")]
    RateII,
    /// R / R(n'' = 0) for both coupling types.
    #[serde(rename = "rate_ratio_to_lossless")]
    RateRatio,
    #[serde(rename = "sinc_profile")]
    SincProfile,
    #[serde(rename = "a_factor_gain")]
    AFactorGain,
    /// A_λμ of the configured coupling type as `_re`/`_im` pairs.
    #[serde(rename = "amplitude_matrix")]
    AmplitudeMatrix,
}

const OBSERVABLES: [Observable; 6] = [
    Observable::RateI,
    Observable::RateII,
    Observable::RateRatio,
    Observable::SincProfile,
    Observable::AFactorGain,
    Observable::AmplitudeMatrix,
];

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::RateI => "rate_I",
            Observable::RateII => "rate_II",
            Observable::RateRatio => "rate_ratio_to_lossless",
            Observable::SincProfile => "sinc_profile",
            Observable::AFactorGain => "a_factor_gain",
            Observable::AmplitudeMatrix => "amplitude_matrix",
        }
    }

    /// Output columns contributed by this observable.
    pub fn columns(self) -> Vec<String> {
        match self {
            Observable::RateRatio => vec!["rate_ratio_I".into(), "rate_ratio_II".into()],
            Observable::AmplitudeMatrix => ["xx", "xy", "yx", "yy"]
                .iter()
                .flat_map(|ij| [format!("a_{ij}_re"), format!("a_{ij}_im")])
                .collect(),
            other => vec![other.name().into()],
        }
    }

    fn needs_amplitude(self) -> bool {
        matches!(
            self,
            Observable::RateI | Observable::RateII | Observable::RateRatio | Observable::AmplitudeMatrix
        )
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OBSERVABLES
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::validation("observables", format!("unknown observable `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl ScanRange {
    /// Evenly spaced points including both ends.
    pub fn points(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|j| {
                if j + 1 == self.count {
                    self.stop
                } else {
                    self.start + step * j as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRequest {
    pub base: ExperimentConfig,
    pub axis: Axis,
    pub range: ScanRange,
    pub observables: Vec<Observable>,
    pub method: Method,
    pub tol: f64,
}

impl ScanRequest {
    pub fn validate(&self) -> Result<()> {
        let ScanRange { start, stop, count } = self.range;
        if count < 2 {
            return Err(Error::validation("count", format!("{count} points do not make a scan")));
        }
        if !(start.is_finite() && stop.is_finite() && start < stop) {
            return Err(Error::validation(
                "start",
                format!("need start < stop, got {start} and {stop}"),
            ));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::validation("tol", format!("{} is not in (0, 1)", self.tol)));
        }
        if self.observables.is_empty() {
            return Err(Error::validation("observables", "nothing to evaluate"));
        }
        for (i, o) in self.observables.iter().enumerate() {
            if self.observables[..i].contains(o) {
                return Err(Error::validation("observables", format!("`{}` listed twice", o.name())));
            }
        }
        match self.axis {
            Axis::DeltaK => {
                if let Some(o) = self.observables.iter().find(|o| **o != Observable::SincProfile) {
                    return Err(Error::validation(
                        "observables",
                        format!("`{}` is not defined along the delta_k axis", o.name()),
                    ));
                }
            }
            Axis::CrystalLength if start <= 0.0 => {
                return Err(Error::validation("start", "crystal length must be positive"));
            }
            Axis::NImag if start < 0.0 => {
                return Err(Error::validation("start", "n'' must be non-negative"));
            }
            Axis::Frequency if start <= 0.0 => {
                return Err(Error::validation("start", "frequency must be positive"));
            }
            _ => {}
        }
        let uses_amplitude = self.observables.iter().any(|o| o.needs_amplitude());
        if uses_amplitude && self.method == Method::FarField && !self.base.is_collinear() {
            return Err(Error::validation("method", "farfield needs collinear detectors"));
        }
        if uses_amplitude
            && self.method == Method::FarField
            && self.axis != Axis::Frequency
            && !self.base.is_degenerate()
        {
            return Err(Error::validation("method", "farfield needs degenerate frequencies"));
        }
        for value in [start, stop] {
            self.point_config(value)?.validate()?;
        }
        Ok(())
    }

    /// The base config moved to `value` along the axis.
    pub fn point_config(&self, value: f64) -> Result<ExperimentConfig> {
        let mut cfg = self.base.clone();
        match self.axis {
            Axis::NImag => {
                cfg.n_imag = Some(value);
                cfg.n_imag_pump = None;
            }
            Axis::CrystalLength => cfg.crystal_length = value,
            Axis::Frequency => {
                cfg.omega_signal = value;
                cfg.omega_idler = value;
            }
            Axis::DeltaK => {}
        }
        Ok(cfg)
    }
}

/// Echo of what was evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanMetadata {
    pub schema_version: u32,
    pub tool_version: String,
    pub preset: Option<String>,
    pub config: ExperimentConfig,
    pub axis: Axis,
    pub range: ScanRange,
    pub observables: Vec<Observable>,
    pub method: Method,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub metadata: ScanMetadata,
    /// Axis name followed by the observable columns.
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ScanResult {
    /// Values of one column, by name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

fn collinear_phase(cfg: &ExperimentConfig) -> Result<PhaseMatch> {
    let ks = kinematics(cfg.omega_signal, cfg.signal_index()?, Transverse::zeros());
    let ki = kinematics(cfg.omega_idler, cfg.idler_index()?, Transverse::zeros());
    let kp = kinematics(cfg.omega_pump(), cfg.pump_index()?, Transverse::zeros());
    Ok(phase_terms(&ks, &ki, &kp))
}

fn evaluate(req: &ScanRequest, value: f64) -> Result<Vec<f64>> {
    let cfg = req.point_config(value)?;
    cfg.validate()?;
    let rate_of = |c: &ExperimentConfig| amplitude(c, req.method, req.tol).map(|a| a.rate);
    let mut row = vec![value];
    for obs in &req.observables {
        match obs {
            Observable::RateI => row.push(rate_of(&cfg.with_type(Chi2Type::I))?),
            Observable::RateII => row.push(rate_of(&cfg.with_type(Chi2Type::II))?),
            Observable::RateRatio => {
                for kind in [Chi2Type::I, Chi2Type::II] {
                    let typed = cfg.with_type(kind);
                    let lossy = rate_of(&typed)?;
                    let lossless = rate_of(&typed.lossless())?;
                    row.push(if lossy == lossless { 1.0 } else { lossy / lossless });
                }
            }
            Observable::SincProfile => {
                let mut pm = collinear_phase(&cfg)?;
                if req.axis == Axis::DeltaK {
                    pm.delta_k = Complex64::new(2.0 * value / cfg.crystal_length, pm.delta_k.im);
                }
                row.push(sinc_profile(&pm, cfg.crystal_length));
            }
            Observable::AFactorGain => {
                let n = cfg.signal_index()?;
                row.push(a_factor_gain(n * n)?);
            }
            Observable::AmplitudeMatrix => {
                let amp = amplitude(&cfg, req.method, req.tol)?;
                for a in [
                    amp.matrix[(0, 0)],
                    amp.matrix[(0, 1)],
                    amp.matrix[(1, 0)],
                    amp.matrix[(1, 1)],
                ] {
                    row.push(a.re);
                    row.push(a.im);
                }
            }
        }
    }
    Ok(row)
}

/// Evaluates every observable at every axis point.
///
/// Points run in parallel; rows come back in axis order. The first failing
/// point (in axis order) aborts the scan with [`Error::Scan`].
pub fn run_scan(req: &ScanRequest) -> Result<ScanResult> {
    req.validate()?;
    let points = req.range.points();
    let rows: Vec<Result<Vec<f64>>> = points.par_iter().map(|&v| evaluate(req, v)).collect();
    let mut out = Vec::with_capacity(rows.len());
    for (index, row) in rows.into_iter().enumerate() {
        match row {
            Ok(r) => out.push(r),
            Err(source) => {
                return Err(Error::Scan {
                    index,
                    value: points[index],
                    completed: out.len(),
                    source: Box::new(source),
                })
            }
        }
    }
    let mut columns = vec![req.axis.name().to_string()];
    columns.extend(req.observables.iter().flat_map(|o| o.columns()));
    Ok(ScanResult {
        metadata: ScanMetadata {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            preset: None,
            config: req.base.clone(),
            axis: req.axis,
            range: req.range,
            observables: req.observables.clone(),
            method: req.method,
            tol: req.tol,
        },
        columns,
        rows: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::MaterialDispersion;

    fn request(axis: Axis, start: f64, stop: f64, observables: Vec<Observable>) -> ScanRequest {
        let mut base = ExperimentConfig::degenerate(MaterialDispersion::bbo_ordinary(), 2e-3, 3.54e15);
        base.n_imag = Some(1e-6);
        ScanRequest {
            base,
            axis,
            range: ScanRange { start, stop, count: 5 },
            observables,
            method: Method::FarField,
            tol: DEFAULT_TOL,
        }
    }

    #[test]
    fn points_hit_both_ends() {
        let r = ScanRange {
            start: 0.1,
            stop: 0.7,
            count: 7,
        };
        let p = r.points();
        assert_eq!(p.len(), 7);
        assert_eq!(p[0], 0.1);
        assert_eq!(p[6], 0.7);
    }

    #[test]
    fn row_and_column_shape() {
        let req = request(
            Axis::CrystalLength,
            1.9e-3,
            2.1e-3,
            vec![Observable::RateI, Observable::RateRatio, Observable::AmplitudeMatrix],
        );
        let res = run_scan(&req).unwrap();
        assert_eq!(res.rows.len(), 5);
        assert_eq!(res.columns.len(), 1 + 1 + 2 + 8);
        assert!(res.rows.iter().all(|r| r.len() == res.columns.len()));
        assert_eq!(res.column("crystal_length").unwrap()[4], 2.1e-3);
    }

    #[test]
    fn ratio_is_one_without_loss() {
        let req = request(Axis::NImag, 0.0, 1e-5, vec![Observable::RateRatio]);
        let res = run_scan(&req).unwrap();
        assert_eq!(res.rows[0][1], 1.0);
        assert_eq!(res.rows[0][2], 1.0);
        assert!(res.rows[4][1] < 1.0);
    }

    #[test]
    fn validation_catches_bad_requests() {
        let bad_axis = request(Axis::DeltaK, 0.0, 1.0, vec![Observable::RateI]);
        assert!(matches!(run_scan(&bad_axis), Err(Error::Validation { .. })));
        let reversed = request(Axis::NImag, 1e-5, 0.0, vec![Observable::RateI]);
        assert!(reversed.validate().is_err());
        let mut offset = request(Axis::NImag, 0.0, 1e-5, vec![Observable::RateI]);
        offset.base.detectors.offset = [1e-4, 0.0];
        assert!(matches!(offset.validate(), Err(Error::Validation { ref key, .. }) if key == "method"));
        let mut dup = request(Axis::NImag, 0.0, 1e-5, vec![Observable::RateI, Observable::RateI]);
        dup.range.count = 3;
        assert!(dup.validate().is_err());
    }

    #[test]
    fn names_round_trip() {
        for o in OBSERVABLES {
            assert_eq!(o.name().parse::<Observable>().unwrap(), o);
        }
        for a in [Axis::NImag, Axis::CrystalLength, Axis::DeltaK, Axis::Frequency] {
            assert_eq!(a.name().parse::<Axis>().unwrap(), a);
        }
    }
}
