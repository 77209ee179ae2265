//! Biphoton amplitudes and coincidence rates for type I and type II
//! parametric down-conversion in an absorbing planar crystal.

pub mod constants;
pub mod error;
pub mod green;
pub mod optics;
pub mod pdc;
pub mod quadrature;
pub mod scan;

pub use error::{Error, Result};
