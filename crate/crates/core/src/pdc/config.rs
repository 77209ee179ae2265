use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::green::{Chi2Geometry, Chi2Type};
use crate::optics::{dispersion_eval, MaterialDispersion, Transverse};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pump {
    /// Field amplitude E_p [V/m].
    pub amplitude: f64,
    /// Reference plane z_p [m] of the pump phase.
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detectors {
    /// Signal detector distance z_ds [m].
    pub z_signal: f64,
    /// Idler detector distance z_di [m].
    pub z_idler: f64,
    /// Transverse offset ρ_ds - ρ_di [m].
    pub offset: [f64; 2],
}

/// Everything that defines one coincidence measurement.
///
/// The pump frequency is always ω_s + ω_i, so energy conservation holds by
/// construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub material: MaterialDispersion,
    /// Frequency-independent n'' replacing the tabulated values.
    pub n_imag: Option<f64>,
    /// n'' at the pump frequency, taking precedence over `n_imag` there.
    pub n_imag_pump: Option<f64>,
    /// Crystal length L [m].
    pub crystal_length: f64,
    pub pump: Pump,
    pub chi2: Chi2Geometry,
    pub detectors: Detectors,
    pub omega_signal: f64,
    pub omega_idler: f64,
}

impl ExperimentConfig {
    /// Degenerate configuration with unit pump field, d = 1 pm/V, type I
    /// coupling and both detectors 1 m away on axis.
    pub fn degenerate(material: MaterialDispersion, crystal_length: f64, omega: f64) -> Self {
        ExperimentConfig {
            material,
            n_imag: None,
            n_imag_pump: None,
            crystal_length,
            pump: Pump {
                amplitude: 1.0,
                distance: 0.0,
            },
            chi2: Chi2Geometry {
                kind: Chi2Type::I,
                strength: 1e-12,
            },
            detectors: Detectors {
                z_signal: 1.0,
                z_idler: 1.0,
                offset: [0.0, 0.0],
            },
            omega_signal: omega,
            omega_idler: omega,
        }
    }

    pub fn omega_pump(&self) -> f64 {
        self.omega_signal + self.omega_idler
    }

    pub fn is_degenerate(&self) -> bool {
        self.omega_signal == self.omega_idler
    }

    pub fn is_collinear(&self) -> bool {
        self.detectors.offset == [0.0, 0.0]
    }

    pub fn offset(&self) -> Transverse {
        Transverse::new(self.detectors.offset[0], self.detectors.offset[1])
    }

    pub fn with_type(&self, kind: Chi2Type) -> Self {
        let mut out = self.clone();
        out.chi2.kind = kind;
        out
    }

    /// The same configuration with every n'' set to zero.
    pub fn lossless(&self) -> Self {
        ExperimentConfig {
            n_imag: Some(0.0),
            n_imag_pump: None,
            ..self.clone()
        }
    }

    fn index_with(&self, omega: f64, n_imag: Option<f64>) -> Result<Complex64> {
        let n = dispersion_eval(&self.material, omega)?;
        Ok(match n_imag {
            Some(ni) => Complex64::new(n.re, ni),
            None => n,
        })
    }

    pub fn signal_index(&self) -> Result<Complex64> {
        self.index_with(self.omega_signal, self.n_imag)
    }

    pub fn idler_index(&self) -> Result<Complex64> {
        self.index_with(self.omega_idler, self.n_imag)
    }

    pub fn pump_index(&self) -> Result<Complex64> {
        self.index_with(self.omega_pump(), self.n_imag_pump.or(self.n_imag))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::validation(key, format!("{v} must be positive and finite")))
            }
        };
        positive("crystal_length", self.crystal_length)?;
        positive("z_signal", self.detectors.z_signal)?;
        positive("z_idler", self.detectors.z_idler)?;
        positive("omega_signal", self.omega_signal)?;
        positive("omega_idler", self.omega_idler)?;
        if !self.pump.amplitude.is_finite() || !self.pump.distance.is_finite() {
            return Err(Error::validation("pump_amplitude", "pump parameters must be finite"));
        }
        if !self.chi2.strength.is_finite() {
            return Err(Error::validation("d_eff", "must be finite"));
        }
        if !self.detectors.offset.iter().all(|v| v.is_finite()) {
            return Err(Error::validation("offset_x", "detector offset must be finite"));
        }
        for (key, v) in [("n_imag", self.n_imag), ("n_imag_pump", self.n_imag_pump)] {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::validation(
                        key,
                        format!("{v} must be non-negative (no gain media)"),
                    ));
                }
                if v > 0.0 && self.material.is_vacuum() {
                    return Err(Error::validation(key, "vacuum cannot absorb"));
                }
            }
        }
        // surface out-of-range frequencies as errors up front
        self.signal_index()?;
        self.idler_index()?;
        self.pump_index()?;
        Ok(())
    }
}
