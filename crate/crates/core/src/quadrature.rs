//! Adaptive quadrature for the transverse-wave-vector integrals.
//!
//! Radial integrals use paired Gauss-Legendre panels (64 and 56 nodes) with
//! global adaptive bisection. Oscillatory integrands can supply their local
//! angular frequency so the initial panels already resolve the phase.
//! Angular integrals over a full period use the trapezoid rule with
//! successive doubling.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::ops::{Add, Sub};
use std::sync::OnceLock;

use nalgebra::{Matrix2, Matrix3};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Values that can be integrated: a vector space with a max-abs size.
pub trait QuadValue: Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> {
    fn zero() -> Self;
    fn scale(self, s: f64) -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl QuadValue for Matrix2<Complex64> {
    fn zero() -> Self {
        Matrix2::zeros()
    }
    fn scale(self, s: f64) -> Self {
        self * Complex64::new(s, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl QuadValue for Matrix3<Complex64> {
    fn zero() -> Self {
        Matrix3::zeros()
    }
    fn scale(self, s: f64) -> Self {
        self * Complex64::new(s, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_floor: f64,
    pub max_subdivisions: usize,
    /// Integrate in θ with x = a + (b - a) sin θ, which removes
    /// inverse-square-root behaviour at the upper endpoint.
    pub sine_map: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-8,
            abs_floor: 0.0,
            max_subdivisions: 1 << 20,
            sine_map: false,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerance(rel_tol: f64) -> Self {
        QuadratureSpec {
            rel_tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::validation("tol", format!("{} must be positive", self.rel_tol)));
        }
        if !(self.abs_floor >= 0.0) {
            return Err(Error::validation("abs_floor", "must be non-negative"));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::validation("max_subdivisions", "must be at least 1"));
        }
        Ok(())
    }
}

/// Integral value with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
fn gauss_legendre(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

const HIGH_ORDER: usize = 64;
const LOW_ORDER: usize = 56;
/// Oscillation periods per initial panel, chosen so the low-order rule is
/// still accurate to ~1e-13.
const PERIODS_PER_PANEL: f64 = 16.0;

fn rules() -> &'static (Rule, Rule) {
    static RULES: OnceLock<(Rule, Rule)> = OnceLock::new();
    RULES.get_or_init(|| (gauss_legendre(HIGH_ORDER), gauss_legendre(LOW_ORDER)))
}

#[derive(Clone, Copy)]
struct Panel<T> {
    lo: f64,
    hi: f64,
    value: T,
    error: f64,
    /// ∫|f| over the panel, for the round-off floor.
    abs: f64,
}

fn eval_panel<T, G>(g: &G, lo: f64, hi: f64) -> Result<Panel<T>>
where
    T: QuadValue,
    G: Fn(f64, f64) -> Result<T>,
{
    let (high, low) = rules();
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let mut vh = T::zero();
    let mut abs = 0.0;
    for (x, w) in high.nodes.iter().zip(&high.weights) {
        let f = g(c, h * x)?;
        abs += w * f.magnitude();
        vh = vh + f.scale(*w);
    }
    let mut vl = T::zero();
    for (x, w) in low.nodes.iter().zip(&low.weights) {
        vl = vl + g(c, h * x)?.scale(*w);
    }
    let value = vh.scale(h);
    let error = (vh - vl).scale(h).magnitude();
    if !(error.is_finite() && abs.is_finite()) {
        return Err(Error::domain(format!("integrand is not finite on [{lo:e}, {hi:e}]")));
    }
    Ok(Panel {
        lo,
        hi,
        value,
        error,
        abs: abs * h.abs(),
    })
}

fn pairwise_sum<T: QuadValue>(values: &[T]) -> T {
    match values.len() {
        0 => T::zero(),
        1 => values[0],
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

/// Adaptive integral of `f` over [a, b].
pub fn integrate_radial<T, F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T + Sync,
{
    integrate_radial_with(|x| Ok(f(x)), a, b, spec, RadialHints::default())
}

/// Optional knowledge about an oscillatory integrand, as functions of the
/// original variable x.
#[derive(Clone, Copy, Default)]
pub struct RadialHints<'a> {
    /// Local angular frequency of the integrand's phase [rad per unit x].
    /// Initial panels are sized to a fixed number of periods.
    pub frequency: Option<&'a (dyn Fn(f64) -> f64 + Sync)>,
    /// Largest phase magnitude [rad] entering f(x). Rounding in that phase
    /// limits the attainable accuracy; panels whose error estimate is at
    /// this floor are treated as noise and combined in quadrature.
    pub phase: Option<&'a (dyn Fn(f64) -> f64 + Sync)>,
}

/// Panels at or below this multiple of the rounding noise count as noise.
const NOISE_FACTOR: f64 = 4.0;

/// Integration node split as `base + offset`, where `base` is shared by
/// every node of a panel and `offset` carries full relative precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abscissa {
    pub base: f64,
    pub offset: f64,
}

impl Abscissa {
    pub fn x(&self) -> f64 {
        self.base + self.offset
    }
}

/// Adaptive integral of a fallible integrand.
pub fn integrate_radial_with<T, F>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
    hints: RadialHints<'_>,
) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> Result<T> + Sync,
{
    integrate_radial_split(|node| f(node.x()), a, b, spec, hints)
}

/// As [`integrate_radial_with`], with nodes handed over in split form so
/// that large phases can be evaluated relative to the panel base.
pub fn integrate_radial_split<T, F>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
    hints: RadialHints<'_>,
) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(Abscissa) -> Result<T> + Sync,
{
    spec.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::usage(format!(
            "integration interval [{a}, {b}] is empty or infinite"
        )));
    }
    let span = b - a;
    let sine_map = spec.sine_map;
    let to_x = |t: f64| if sine_map { a + span * t.sin() } else { t };
    let g = |c: f64, tau: f64| -> Result<T> {
        if sine_map {
            // sin(c + τ) - sin(c) = 2 cos(c + τ/2) sin(τ/2)
            let node = Abscissa {
                base: a + span * c.sin(),
                offset: span * 2.0 * (c + 0.5 * tau).cos() * (0.5 * tau).sin(),
            };
            Ok(f(node)?.scale(span * (c + tau).cos()))
        } else {
            f(Abscissa { base: c, offset: tau })
        }
    };
    let (t0, t1) = if sine_map { (0.0, FRAC_PI_2) } else { (a, b) };
    let nu = |t: f64| -> f64 {
        match hints.frequency {
            None => 0.0,
            Some(freq) if sine_map => freq(to_x(t)) * span * t.cos().abs(),
            Some(freq) => freq(t),
        }
    };
    let eps = f64::EPSILON;
    let noise = |p: &Panel<T>| -> f64 {
        let phase = hints.phase.map_or(1.0, |h| h(to_x(0.5 * (p.lo + p.hi))).max(1.0));
        NOISE_FACTOR * eps * phase * p.abs
    };
    // (systematic error, squared noise error)
    let split = |p: &Panel<T>| {
        if p.error <= noise(p) {
            (0.0, p.error * p.error)
        } else {
            (p.error, 0.0)
        }
    };

    let bounds = initial_panels(t0, t1, nu, spec.max_subdivisions)?;
    let mut panels: Vec<Panel<T>> = bounds
        .par_iter()
        .map(|&(lo, hi)| eval_panel(&g, lo, hi))
        .collect::<Result<_>>()?;
    let mut subdivisions = panels.len() - 1;

    loop {
        let value = pairwise_sum(&panels.iter().map(|p| p.value).collect::<Vec<_>>());
        let (systematic, noise_sq) = panels
            .iter()
            .map(split)
            .fold((0.0, 0.0), |acc, e| (acc.0 + e.0, acc.1 + e.1));
        let error = systematic + noise_sq.sqrt();
        let abs: f64 = panels.iter().map(|p| p.abs).sum();
        let roundoff = 64.0 * eps * abs;
        let target = (spec.rel_tol * value.magnitude()).max(spec.abs_floor).max(roundoff);
        if error <= target {
            return Ok(Estimate {
                value,
                error: error + roundoff,
                evaluations: panels.len() * (HIGH_ORDER + LOW_ORDER),
            });
        }
        // refine every non-noise panel above its share of the budget
        let share = target / panels.len() as f64;
        let mut chosen: Vec<usize> = (0..panels.len()).filter(|&i| split(&panels[i]).0 > share).collect();
        if chosen.is_empty() {
            match (0..panels.len())
                .filter(|&i| split(&panels[i]).0 > 0.0)
                .max_by(|&i, &j| panels[i].error.total_cmp(&panels[j].error))
            {
                Some(worst) => chosen.push(worst),
                // only rounding noise is left and it exceeds the target
                None => {
                    return Err(Error::Convergence {
                        estimate: value.magnitude(),
                        error,
                        subdivisions,
                    })
                }
            }
        }
        if subdivisions + chosen.len() > spec.max_subdivisions {
            return Err(Error::Convergence {
                estimate: value.magnitude(),
                error,
                subdivisions,
            });
        }
        let halves: Vec<(Panel<T>, Panel<T>)> = chosen
            .par_iter()
            .map(|&i| {
                let p = &panels[i];
                let mid = 0.5 * (p.lo + p.hi);
                Ok((eval_panel(&g, p.lo, mid)?, eval_panel(&g, mid, p.hi)?))
            })
            .collect::<Result<_>>()?;
        subdivisions += chosen.len();
        let mut next = Vec::with_capacity(panels.len() + chosen.len());
        let mut halves = chosen.iter().zip(halves).peekable();
        for (i, p) in panels.iter().enumerate() {
            match halves.peek() {
                Some((&j, _)) if j == i => {
                    let (_, (l, r)) = halves.next().expect("peeked");
                    next.push(l);
                    next.push(r);
                }
                _ => next.push(*p),
            }
        }
        panels = next;
    }
}

/// Marches across [t0, t1] choosing panel widths from the local frequency.
fn initial_panels(t0: f64, t1: f64, nu: impl Fn(f64) -> f64, budget: usize) -> Result<Vec<(f64, f64)>> {
    let span = t1 - t0;
    // a non-finite hint (e.g. exactly at a branch point) carries no information
    let width_for = |nu: f64| {
        if nu > 0.0 && nu.is_finite() {
            (PERIODS_PER_PANEL * TAU / nu).clamp(1e-12 * span, span)
        } else {
            span
        }
    };
    let mut out = Vec::new();
    let mut t = t0;
    while t < t1 {
        let mut w = width_for(nu(t));
        let ahead = (t + w).min(t1);
        w = w.min(width_for(nu(ahead)));
        w = w.min(width_for(nu(t + 0.5 * w)));
        if t1 - (t + w) < 1e-3 * w {
            w = t1 - t;
        }
        out.push((t, t + w));
        t += w;
        if out.len() > budget {
            return Err(Error::Convergence {
                estimate: f64::NAN,
                error: f64::INFINITY,
                subdivisions: out.len(),
            });
        }
    }
    if let Some(last) = out.last_mut() {
        last.1 = t1;
    }
    Ok(out)
}

/// Point on the unit circle handed to angular integrands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Azimuth {
    pub angle: f64,
    pub cos: f64,
    pub sin: f64,
}

const TRIG_TABLE: usize = 4096;

fn trig_table() -> &'static [(f64, f64)] {
    static TABLE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..TRIG_TABLE)
            .map(|j| {
                let (s, c) = (TAU * j as f64 / TRIG_TABLE as f64).sin_cos();
                (c, s)
            })
            .collect()
    })
}

fn azimuth(j: usize, n: usize) -> Azimuth {
    let angle = TAU * j as f64 / n as f64;
    if TRIG_TABLE.is_multiple_of(n) {
        let (cos, sin) = trig_table()[j * (TRIG_TABLE / n)];
        Azimuth { angle, cos, sin }
    } else {
        let (sin, cos) = angle.sin_cos();
        Azimuth { angle, cos, sin }
    }
}

const ANGULAR_START: usize = 8;
const ANGULAR_MAX: usize = 1 << 20;

/// Integral over φ ∈ [0, 2π) of a periodic integrand.
pub fn integrate_angular<T, F>(f: F, spec: &QuadratureSpec) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(Azimuth) -> T,
{
    try_integrate_angular(|az| Ok(f(az)), spec)
}

pub fn try_integrate_angular<T, F>(f: F, spec: &QuadratureSpec) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(Azimuth) -> Result<T>,
{
    let mut n = ANGULAR_START;
    let mut sum = T::zero();
    let mut abs = 0.0;
    for j in 0..n {
        let v = f(azimuth(j, n))?;
        abs += v.magnitude();
        sum = sum + v;
    }
    let mut estimate = sum.scale(TAU / n as f64);
    loop {
        let mut odd = T::zero();
        for j in (1..2 * n).step_by(2) {
            let v = f(azimuth(j, 2 * n))?;
            abs += v.magnitude();
            odd = odd + v;
        }
        sum = sum + odd;
        n *= 2;
        let refined = sum.scale(TAU / n as f64);
        let error = (refined - estimate).magnitude();
        let roundoff = 64.0 * f64::EPSILON * abs * TAU / n as f64;
        let target = (spec.rel_tol * refined.magnitude()).max(spec.abs_floor).max(roundoff);
        if !error.is_finite() {
            return Err(Error::domain("angular integrand is not finite"));
        }
        if error <= target {
            return Ok(Estimate {
                value: refined,
                error,
                evaluations: n,
            });
        }
        if n >= ANGULAR_MAX {
            return Err(Error::Convergence {
                estimate: refined.magnitude(),
                error,
                subdivisions: n,
            });
        }
        estimate = refined;
    }
}

/// Plane-wave expansion of the scalar outgoing wave next to its closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylComparison {
    pub quadrature: Complex64,
    pub error: f64,
    pub closed_form: Complex64,
}

impl WeylComparison {
    pub fn relative_deviation(&self) -> f64 {
        (self.quadrature - self.closed_form).norm() / self.closed_form.norm()
    }
}

/// Decay length multiple at which the evanescent integral is truncated.
pub(crate) const EVANESCENT_CUTOFF: f64 = 40.0;

/// Evaluates (i/8π²)∫d²k e^{ik·ρ + i q_z z}/q_z and e^{iqr}/(4πr).
pub fn weyl_oracle(z: f64, rho: f64, q: f64, spec: &QuadratureSpec) -> Result<WeylComparison> {
    if !(z > 0.0) {
        return Err(Error::usage("the observation plane must lie above the source (z > 0)"));
    }
    if !(q >= 0.0 && rho >= 0.0) {
        return Err(Error::usage("wave number and lateral distance must be non-negative"));
    }
    let i = Complex64::i();
    let angular = |k: f64| -> Result<Complex64> {
        if rho == 0.0 {
            return Ok(Complex64::new(TAU, 0.0));
        }
        let ang_spec = QuadratureSpec {
            rel_tol: spec.rel_tol * 1e-2,
            abs_floor: 0.0,
            ..*spec
        };
        Ok(integrate_angular(|az| (i * k * rho * az.cos).exp(), &ang_spec)?.value)
    };

    let mut total = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    if q > 0.0 {
        let prop_spec = QuadratureSpec {
            sine_map: true,
            ..*spec
        };
        let integrand = |k: f64| -> Result<Complex64> {
            let qz = (q * q - k * k).max(0.0).sqrt();
            Ok(angular(k)? * k / qz * (i * qz * z).exp())
        };
        let freq = |k: f64| k * (z / (q * q - k * k).max(0.0).sqrt().max(1e-8 * q) + rho);
        let est = integrate_radial_with(
            integrand,
            0.0,
            q,
            &prop_spec,
            RadialHints {
                frequency: Some(&freq),
                ..Default::default()
            },
        )?;
        total += est.value;
        error += est.error;
    }
    // k dk / q_z = -i dκ with κ = sqrt(k² - q²)
    let evanescent = |kappa: f64| -> Result<Complex64> {
        let k = (q * q + kappa * kappa).sqrt();
        Ok(angular(k)? * (-i) * (-kappa * z).exp())
    };
    let freq = |kappa: f64| rho * kappa / (q * q + kappa * kappa).sqrt().max(f64::MIN_POSITIVE);
    let est = integrate_radial_with(
        evanescent,
        0.0,
        EVANESCENT_CUTOFF / z,
        spec,
        RadialHints {
            frequency: Some(&freq),
            ..Default::default()
        },
    )?;
    total += est.value;
    error += est.error;

    let scale = i / (8.0 * PI * PI);
    let r = z.hypot(rho);
    Ok(WeylComparison {
        quadrature: total * scale,
        error: error * scale.norm(),
        closed_form: (i * q * r).exp() / (4.0 * PI * r),
    })
}
