//! Vector wave functions, χ⁽²⁾ contractions and the transmission Green
//! tensor of a vacuum-crystal-vacuum slab.

mod tensor;
mod wave;

pub use tensor::{f_factor, scattering_green_point, CrystalSlab};
pub use wave::{
    contract_chi2, dyadic_product, vector_wave_m, vector_wave_n, Chi2Geometry, Chi2Type, Direction, WaveFunction,
    WaveKind,
};
pub(crate) use wave::{unit_contractions, unit_dyads};
