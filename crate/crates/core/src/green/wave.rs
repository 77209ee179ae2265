use nalgebra::{Matrix2, Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::Transverse;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WaveKind {
    /// M function.
    Te,
    /// N function.
    Tm,
}

/// Sign of k_z in k⊥ ± k_z ẑ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Up => 1.0,
            Direction::Down => -1.0,
        }
    }

    fn flipped(self) -> Self {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }
}

/// A TE or TM vector wave function together with the mode that generated it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveFunction {
    pub components: Vector3<Complex64>,
    pub kind: WaveKind,
    pub k_perp: Transverse,
    /// k_z and k of the generating mode; `None` for M, which does not use them.
    pub kz: Option<Complex64>,
    pub k: Option<Complex64>,
    pub direction: Direction,
}

impl WaveFunction {
    /// The same wave function for the fully reversed wave vector
    /// (k⊥, ±k_z) -> (-k⊥, ∓k_z).
    ///
    /// This is how a source argument `-k⊥` is read throughout: M flips sign,
    /// N is unchanged.
    pub fn reversed(&self) -> Result<WaveFunction> {
        match self.kind {
            WaveKind::Te => vector_wave_m(-self.k_perp),
            WaveKind::Tm => vector_wave_n(
                -self.k_perp,
                self.kz.expect("N carries k_z"),
                self.k.expect("N carries k"),
                self.direction.flipped(),
            ),
        }
    }
}

fn check_direction(k_perp: Transverse) -> Result<()> {
    if !(k_perp.norm_squared() > 0.0) || !k_perp.iter().all(|v| v.is_finite()) {
        return Err(Error::domain(
            "TE/TM wave functions are undefined at k⊥ = 0; use the limiting contracted forms",
        ));
    }
    Ok(())
}

/// M(k⊥) = i (k⊥ × ẑ) = i (k_y, -k_x, 0).
pub fn vector_wave_m(k_perp: Transverse) -> Result<WaveFunction> {
    check_direction(k_perp)?;
    let i = Complex64::i();
    Ok(WaveFunction {
        components: Vector3::new(i * k_perp.y, -i * k_perp.x, Complex64::new(0.0, 0.0)),
        kind: WaveKind::Te,
        k_perp,
        kz: None,
        k: None,
        direction: Direction::Up,
    })
}

/// N(k⊥) = -(1/k) (k⊥ ± k_z ẑ) × (k⊥ × ẑ).
pub fn vector_wave_n(k_perp: Transverse, kz: Complex64, k: Complex64, direction: Direction) -> Result<WaveFunction> {
    check_direction(k_perp)?;
    if k == Complex64::new(0.0, 0.0) {
        return Err(Error::domain("N requires a non-zero wave number"));
    }
    let skz = kz * direction.sign();
    let inv = -1.0 / k;
    Ok(WaveFunction {
        components: Vector3::new(inv * skz * k_perp.x, inv * skz * k_perp.y, inv * -k_perp.norm_squared()),
        kind: WaveKind::Tm,
        k_perp,
        kz: Some(kz),
        k: Some(k),
        direction,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chi2Type {
    /// Parallel signal and idler polarizations, d (x̂x̂ + ŷŷ).
    I,
    /// Perpendicular polarizations, d (x̂ŷ + ŷx̂).
    II,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chi2Geometry {
    pub kind: Chi2Type,
    /// Effective nonlinear coefficient d [m/V].
    pub strength: f64,
}

impl Chi2Geometry {
    /// Unit tensor pattern (without the strength).
    pub fn tensor(&self) -> Matrix3<f64> {
        match self.kind {
            Chi2Type::I => Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0),
            Chi2Type::II => Matrix3::new(0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0),
        }
    }
}

fn check_pair(a: &WaveFunction, b: &WaveFunction) -> Result<()> {
    let scale = a.k_perp.norm().max(b.k_perp.norm());
    if (a.k_perp + b.k_perp).norm() > 1e-12 * scale {
        return Err(Error::usage(
            "wave functions must be generated by opposite transverse vectors",
        ));
    }
    Ok(())
}

fn require(w: &WaveFunction, dir: Direction, role: &str) -> Result<()> {
    if w.kind == WaveKind::Tm && w.direction != dir {
        return Err(Error::usage(format!("{role} N function must use the {dir:?} sign")));
    }
    Ok(())
}

fn ratio(w: &WaveFunction) -> Complex64 {
    match (w.kz, w.k) {
        (Some(kz), Some(k)) => kz / k,
        _ => Complex64::new(0.0, 0.0),
    }
}

/// Σ d_αβ a_α b_β for the signal source `a` (from -k⊥, reversed wave
/// vector) and the idler source `b` (from +k⊥), with the unit tensor.
pub fn contract_chi2(geom: &Chi2Geometry, a: &WaveFunction, b: &WaveFunction) -> Result<Complex64> {
    check_pair(a, b)?;
    require(a, Direction::Down, "signal source")?;
    require(b, Direction::Up, "idler source")?;
    let (kx, ky) = (b.k_perp.x, b.k_perp.y);
    let kp2 = kx * kx + ky * ky;
    let (rs, ri) = (ratio(a), ratio(b));
    let i = Complex64::i();
    let re = |v: f64| Complex64::new(v, 0.0);
    Ok(match (geom.kind, a.kind, b.kind) {
        (Chi2Type::I, WaveKind::Te, WaveKind::Te) => re(kp2),
        (Chi2Type::I, WaveKind::Tm, WaveKind::Tm) => kp2 * rs * ri,
        (Chi2Type::I, _, _) => re(0.0),
        (Chi2Type::II, WaveKind::Te, WaveKind::Te) => re(-2.0 * kx * ky),
        (Chi2Type::II, WaveKind::Te, WaveKind::Tm) => -i * (kx * kx - ky * ky) * ri,
        (Chi2Type::II, WaveKind::Tm, WaveKind::Te) => i * (kx * kx - ky * ky) * rs,
        (Chi2Type::II, WaveKind::Tm, WaveKind::Tm) => 2.0 * kx * ky * rs * ri,
    })
}

/// a ⊗ b for the signal detection function `a` (from +k⊥) and the idler
/// detection function `b` (from -k⊥, reversed wave vector).
#[rustfmt::skip]
pub fn dyadic_product(a: &WaveFunction, b: &WaveFunction) -> Result<Matrix3<Complex64>> {
    check_pair(a, b)?;
    require(a, Direction::Up, "signal detection")?;
    require(b, Direction::Down, "idler detection")?;
    let (kx, ky) = (a.k_perp.x, a.k_perp.y);
    let kp2 = kx * kx + ky * ky;
    let i = Complex64::i();
    let c = |v: f64| Complex64::new(v, 0.0);
    let z = c(0.0);
    Ok(match (a.kind, b.kind) {
        (WaveKind::Te, WaveKind::Te) => Matrix3::new(
            c(ky * ky), c(-kx * ky), z,
            c(-kx * ky), c(kx * kx), z,
            z, z, z,
        ),
        (WaveKind::Te, WaveKind::Tm) => {
            let kzi = b.kz.expect("N carries k_z");
            let f = -1.0 / b.k.expect("N carries k");
            Matrix3::new(
                f * i * kx * ky * kzi, f * i * ky * ky * kzi, f * -i * ky * kp2,
                f * -i * kx * kx * kzi, f * -i * kx * ky * kzi, f * i * kx * kp2,
                z, z, z,
            )
        }
        (WaveKind::Tm, WaveKind::Te) => {
            let kzs = a.kz.expect("N carries k_z");
            let f = 1.0 / a.k.expect("N carries k");
            Matrix3::new(
                f * i * kx * ky * kzs, f * -i * kx * kx * kzs, z,
                f * i * ky * ky * kzs, f * -i * kx * ky * kzs, z,
                f * -i * ky * kp2, f * i * kx * kp2, z,
            )
        }
        (WaveKind::Tm, WaveKind::Tm) => {
            let (kzs, kzi) = (a.kz.expect("N carries k_z"), b.kz.expect("N carries k_z"));
            let f = 1.0 / (a.k.expect("N carries k") * b.k.expect("N carries k"));
            Matrix3::new(
                f * kx * kx * kzs * kzi, f * kx * ky * kzs * kzi, f * -kx * kzs * kp2,
                f * kx * ky * kzs * kzi, f * ky * ky * kzs * kzi, f * -ky * kzs * kp2,
                f * -kx * kzi * kp2, f * -ky * kzi * kp2, c(kp2 * kp2) * f,
            )
        }
    })
}

/// Transverse blocks of the four dyadic products divided by k⊥², at unit
/// direction (c, s), indexed `[signal][idler]` with 0 = TE, 1 = TM.
/// `rs` and `ri` are k_z / k of signal and idler.
pub(crate) fn unit_dyads(c: f64, s: f64, rs: Complex64, ri: Complex64) -> [[Matrix2<Complex64>; 2]; 2] {
    let i = Complex64::i();
    let r = |v: f64| Complex64::new(v, 0.0);
    let te_te = Matrix2::new(r(s * s), r(-c * s), r(-c * s), r(c * c));
    let te_tm = Matrix2::new(i * c * s, i * s * s, -i * c * c, -i * c * s) * -ri;
    let tm_te = Matrix2::new(i * c * s, -i * c * c, i * s * s, -i * c * s) * rs;
    let tm_tm = Matrix2::new(r(c * c), r(c * s), r(c * s), r(s * s)) * (rs * ri);
    [[te_te, te_tm], [tm_te, tm_tm]]
}

/// Contractions divided by k⊥² at unit direction (c, s), same indexing.
pub(crate) fn unit_contractions(kind: Chi2Type, c: f64, s: f64, rs: Complex64, ri: Complex64) -> [[Complex64; 2]; 2] {
    let i = Complex64::i();
    let zero = Complex64::new(0.0, 0.0);
    match kind {
        Chi2Type::I => [[Complex64::new(1.0, 0.0), zero], [zero, rs * ri]],
        Chi2Type::II => {
            let cs2 = 2.0 * c * s;
            let d = c * c - s * s;
            [[Complex64::new(-cs2, 0.0), -i * d * ri], [i * d * rs, cs2 * rs * ri]]
        }
    }
}
