//! Phase matching, X-factors, k⊥ integrands and the biphoton amplitude.

mod amplitude;
mod config;
mod integrand;
mod phase;

pub use amplitude::{amplitude, amplitude_farfield, amplitude_numeric, rate, BiphotonAmplitude, Method};
pub use config::{Detectors, ExperimentConfig, Pump};
pub use integrand::{integrand, integrand_type_i, integrand_type_ii, reduced_integrand, x_factor};
pub use phase::{phase_terms, sinc, sinc_profile, PhaseMatch};
