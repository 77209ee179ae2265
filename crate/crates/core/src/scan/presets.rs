use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::optics::MaterialDispersion;
use crate::pdc::{ExperimentConfig, Method};

use super::{Axis, Observable, ScanRange, ScanRequest, DEFAULT_TOL};

pub const PRESETS: [&str; 4] = ["fig3", "fig4", "fig5", "fig6"];

/// BBO (ordinary), degenerate at ω = 3.54e15 rad/s, L = 2 mm: n(ω) = 1.67,
/// n(2ω) = 1.75.
fn base() -> ExperimentConfig {
    ExperimentConfig::degenerate(MaterialDispersion::bbo_ordinary(), 2e-3, 3.54e15)
}

fn request(
    base: ExperimentConfig,
    axis: Axis,
    start: f64,
    stop: f64,
    count: usize,
    observables: Vec<Observable>,
) -> ScanRequest {
    ScanRequest {
        base,
        axis,
        range: ScanRange { start, stop, count },
        observables,
        method: Method::FarField,
        tol: DEFAULT_TOL,
    }
}

/// Built-in scans reproducing the published figures.
///
/// * `fig3`: phase-matching profile against ΔkL/2 with unequal pump and
///   signal absorption.
/// * `fig4`: |A|⁴ - 1 against n''.
/// * `fig5`: R/R₀ against n'' for both types.
/// * `fig6`: R against L for both types.
pub fn preset(name: &str) -> Result<ScanRequest> {
    let mut cfg = base();
    let req = match name {
        "fig3" => {
            cfg.n_imag = Some(1e-6);
            cfg.n_imag_pump = Some(2e-6);
            request(cfg, Axis::DeltaK, 0.0, 4.0 * PI, 401, vec![Observable::SincProfile])
        }
        "fig4" => request(cfg, Axis::NImag, 0.0, 1e-3, 101, vec![Observable::AFactorGain]),
        "fig5" => request(cfg, Axis::NImag, 0.0, 1e-5, 20, vec![Observable::RateRatio]),
        "fig6" => {
            cfg.n_imag = Some(1e-6);
            request(
                cfg,
                Axis::CrystalLength,
                1.9e-3,
                2.1e-3,
                400,
                vec![Observable::RateI, Observable::RateII],
            )
        }
        other => {
            return Err(Error::validation(
                "preset",
                format!("unknown preset `{other}`; choose one of {}", PRESETS.join(", ")),
            ))
        }
    };
    req.validate()?;
    Ok(req)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scan::run_scan;

    #[test]
    fn all_presets_validate() {
        for name in PRESETS {
            assert!(preset(name).is_ok(), "{name}");
        }
        assert!(preset("fig7").is_err());
    }

    #[test]
    fn captioned_indices() {
        let cfg = preset("fig5").unwrap().base;
        assert!((cfg.signal_index().unwrap().re - 1.67).abs() < 1e-4);
        assert!((cfg.pump_index().unwrap().re - 1.75).abs() < 1e-4);
        assert_eq!(cfg.crystal_length, 2e-3);
    }

    #[test]
    fn fig4_gain_starts_at_zero_and_grows() {
        let res = run_scan(&preset("fig4").unwrap()).unwrap();
        let gain = res.column("a_factor_gain").unwrap();
        assert_eq!(gain[0], 0.0);
        assert!(gain.windows(2).all(|w| w[1] > w[0]));
    }
}
