use std::f64::consts::PI;

use nalgebra::{Vector2, Vector3};
use num_complex::Complex64;
use proptest::prelude::*;

use biphoton::green::{
    contract_chi2, dyadic_product, f_factor, scattering_green_point, vector_wave_m, vector_wave_n, Chi2Geometry,
    Chi2Type, CrystalSlab, Direction, WaveKind,
};
use biphoton::optics::{fresnel, kinematics, Polarization, Transverse};
use biphoton::quadrature::{weyl_oracle, QuadratureSpec};

fn dot(a: &Vector3<Complex64>, b: &Vector3<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

#[test]
fn weyl_static_limit() {
    let spec = QuadratureSpec::with_tolerance(1e-10);
    for (z, rho) in [(1.0, 0.0), (0.5, 0.7), (2.0, 3.0)] {
        let w = weyl_oracle(z, rho, 0.0, &spec).unwrap();
        let coulomb = 1.0 / (4.0 * PI * f64::hypot(z, rho));
        assert!(
            (w.quadrature.re - coulomb).abs() < 1e-8 * coulomb,
            "{z} {rho}: {}",
            w.quadrature
        );
        assert!(w.quadrature.im.abs() < 1e-8 * coulomb);
    }
}

#[test]
fn weyl_inverse_distance_scaling() {
    let spec = QuadratureSpec::with_tolerance(1e-9);
    let q = 1.0;
    let near = weyl_oracle(20.0, 0.0, q, &spec).unwrap();
    let far = weyl_oracle(40.0, 0.0, q, &spec).unwrap();
    assert!(near.relative_deviation() < 1e-6);
    assert!(far.relative_deviation() < 1e-6);
    assert!((near.quadrature.norm() / far.quadrature.norm() - 2.0).abs() < 1e-5);
}

#[test]
fn green_point_far_zone_scaling() {
    let omega = 3e14;
    let q = omega / biphoton::constants::C;
    let slab = CrystalSlab {
        eps: Complex64::new(1.67 * 1.67, 0.0),
        length: 2e-5,
    };
    let spec = QuadratureSpec::with_tolerance(1e-6);
    let point =
        |zd: f64| scattering_green_point(Vector3::new(0.0, 0.0, zd), Vector3::zeros(), omega, &slab, &spec).unwrap();
    let (zd1, zd2) = (2000.0 / q, 4000.0 / q);
    let (g1, g2) = (point(zd1), point(zd2));
    for g in [&g1, &g2] {
        let scale = g[(0, 0)].norm();
        assert!((g[(0, 0)] - g[(1, 1)]).norm() < 1e-6 * scale);
        for (i, j) in [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)] {
            assert!(g[(i, j)].norm() < 1e-6 * scale, "({i},{j}) = {}", g[(i, j)]);
        }
        // longitudinal part is suppressed on axis in the far zone
        assert!(g[(2, 2)].norm() < 1e-2 * scale);
    }
    let ratio = g1[(0, 0)].norm() / g2[(0, 0)].norm();
    assert!((ratio - zd2 / zd1).abs() < 0.02 * zd2 / zd1, "ratio {ratio}");
}

#[test]
fn f_factor_is_path_propagation_for_weak_contrast() {
    // n = 1 + iκ reflects at the 1e-6 level, so only the two path phases remain
    let omega = 3.54e15;
    let length = 0.05;
    let n = Complex64::new(1.0, 1e-6);
    let kin = kinematics(omega, n, Transverse::zeros());
    let te = fresnel(Polarization::Te, &kin, n * n, length).unwrap();
    let i = Complex64::i();
    for z_a in [-0.5 * length, 0.0, 0.3 * length] {
        let z_d = 0.2;
        let ours = f_factor(Polarization::Te, z_d, z_a, &kin, &te, length).unwrap();
        let path = (i * kin.q * (z_d - 0.5 * length)).exp() * (i * kin.k * (0.5 * length - z_a)).exp();
        assert!((ours - path).norm() < 1e-5, "{z_a}: {ours} vs {path}");
    }
    let deep = f_factor(Polarization::Te, 0.2, -0.5 * length, &kin, &te, length).unwrap();
    assert!((deep.norm() - (-kin.k.im * length).exp()).abs() < 1e-5);
}

proptest! {
    #[test]
    fn wave_functions_are_transverse(
        kx in -2.0f64..2.0,
        ky in -2.0f64..2.0,
        nr in 1.0f64..3.0,
        ni in 0.0f64..0.1,
    ) {
        prop_assume!(kx.hypot(ky) > 1e-3);
        let q = 3.0;
        let kp = Transverse::new(kx, ky);
        let kin = kinematics(q * biphoton::constants::C, Complex64::new(nr, ni), kp);
        for dir in [Direction::Up, Direction::Down] {
            let s = if dir == Direction::Up { 1.0 } else { -1.0 };
            let kvec = Vector3::new(Complex64::new(kx, 0.0), Complex64::new(ky, 0.0), kin.kz * s);
            let m = vector_wave_m(kp).unwrap();
            let n = vector_wave_n(kp, kin.kz, kin.k, dir).unwrap();
            prop_assert!(dot(&kvec, &m.components).norm() < 1e-12);
            prop_assert!(dot(&kvec, &n.components).norm() < 1e-12 * kin.k.norm());
            prop_assert!(dot(&m.components, &n.components).norm() < 1e-12 * kin.k.norm());
            // |M|² = k⊥²
            let mm: f64 = m.components.iter().map(|c| c.norm_sqr()).sum();
            prop_assert!((mm - kp.norm_squared()).abs() < 1e-12 * (1.0 + mm));
        }
    }

    #[test]
    fn reversal_rules(kx in -2.0f64..2.0, ky in -2.0f64..2.0, nr in 1.0f64..3.0) {
        prop_assume!(kx.hypot(ky) > 1e-3);
        let kp = Vector2::new(kx, ky);
        let kin = kinematics(2.0 * biphoton::constants::C, Complex64::new(nr, 0.0), kp);
        let m = vector_wave_m(kp).unwrap();
        let mr = m.reversed().unwrap();
        prop_assert_eq!(mr.components, -m.components);
        let n = vector_wave_n(kp, kin.kz, kin.k, Direction::Up).unwrap();
        let nr_ = n.reversed().unwrap();
        prop_assert_eq!(nr_.kind, WaveKind::Tm);
        prop_assert_eq!(nr_.direction, Direction::Down);
        prop_assert!((nr_.components - n.components).norm() < 1e-15 * (1.0 + n.components.norm()));
    }

    #[test]
    fn contraction_matches_tensor_sum(
        kx in -2.0f64..2.0,
        ky in -2.0f64..2.0,
        ns in 1.0f64..3.0,
        ni in 1.0f64..3.0,
        type_two in any::<bool>(),
        a_tm in any::<bool>(),
        b_tm in any::<bool>(),
    ) {
        prop_assume!(kx.hypot(ky) > 1e-3);
        let kp = Transverse::new(kx, ky);
        let kin_s = kinematics(1.5 * biphoton::constants::C, Complex64::new(ns, 0.0), kp);
        let kin_i = kinematics(2.5 * biphoton::constants::C, Complex64::new(ni, 0.0), kp);
        let geom = Chi2Geometry { kind: if type_two { Chi2Type::II } else { Chi2Type::I }, strength: 1.0 };
        // signal source from -k⊥ (reversed), idler source from +k⊥
        let a = if a_tm {
            vector_wave_n(-kp, kin_s.kz, kin_s.k, Direction::Down).unwrap()
        } else {
            vector_wave_m(-kp).unwrap()
        };
        let b = if b_tm {
            vector_wave_n(kp, kin_i.kz, kin_i.k, Direction::Up).unwrap()
        } else {
            vector_wave_m(kp).unwrap()
        };
        let d = geom.tensor();
        let mut brute = Complex64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                brute += d[(i, j)] * a.components[i] * b.components[j];
            }
        }
        let ours = contract_chi2(&geom, &a, &b).unwrap();
        prop_assert!((ours - brute).norm() < 1e-12 * (1.0 + brute.norm()), "{ours} vs {brute}");

        // detection dyad: signal +k⊥ up, idler -k⊥ down
        let sa = if a_tm { vector_wave_n(kp, kin_s.kz, kin_s.k, Direction::Up).unwrap() } else { vector_wave_m(kp).unwrap() };
        let ib = if b_tm { vector_wave_n(-kp, kin_i.kz, kin_i.k, Direction::Down).unwrap() } else { vector_wave_m(-kp).unwrap() };
        let dy = dyadic_product(&sa, &ib).unwrap();
        let outer = sa.components * ib.components.transpose();
        prop_assert!((dy - outer).norm() < 1e-12 * (1.0 + outer.norm()));
    }
}
