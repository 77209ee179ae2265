use approx::assert_relative_eq;
use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use proptest::prelude::*;

use biphoton::constants::C;
use biphoton::optics::{
    dispersion_eval, fresnel, kinematics, local_field, noise_factor, omega_from_wavelength, MaterialDispersion,
    Polarization, Transverse,
};
use biphoton::Error;

const OMEGA: f64 = 3.54e15;

/// Slab transmission from the boundary conditions, solved as a 4x4 system.
///
/// Unknowns (r, A, B, t) with the field e^{iq_z z} + r e^{-iq_z z} before the
/// slab, A e^{ik_z z} + B e^{-ik_z z} inside and t e^{iq_z (z-L)} after it.
/// `w` is 1 for TE and ε for TM (H_y and its ε-weighted derivative).
fn slab_transmission(kz: Complex64, qz: Complex64, w: Complex64, length: f64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let i = Complex64::i();
    let (ep, em) = ((i * kz * length).exp(), (-i * kz * length).exp());
    let g = kz / w;
    #[rustfmt::skip]
    let m = Matrix4::new(
        -one, one, one, zero,
        qz, g, -g, zero,
        zero, ep, em, -one,
        zero, g * ep, -g * em, -qz,
    );
    let rhs = Vector4::new(one, qz, zero, zero);
    m.lu().solve(&rhs).expect("regular system")[3]
}

#[test]
fn bbo_reference_indices() {
    let bbo = MaterialDispersion::bbo_ordinary();
    let at = |nm: f64| dispersion_eval(&bbo, omega_from_wavelength(nm * 1e-9)).unwrap();
    assert_relative_eq!(at(532.0).re, 1.67, epsilon = 1e-12);
    assert_relative_eq!(at(266.0).re, 1.75, epsilon = 1e-12);
    assert_eq!(at(532.0).im, 0.0);
    // 3.54e15 rad/s sits a fraction of a nanometre from the 532 nm sample
    let n = dispersion_eval(&bbo, OMEGA).unwrap();
    assert!((n.re - 1.67).abs() < 1e-4);
    let n2 = dispersion_eval(&bbo, 2.0 * OMEGA).unwrap();
    assert!((n2.re - 1.75).abs() < 1e-4);
}

#[test]
fn out_of_table_frequency_is_rejected() {
    let bbo = MaterialDispersion::bbo_ordinary();
    let err = dispersion_eval(&bbo, omega_from_wavelength(2000e-9)).unwrap_err();
    assert!(matches!(err, Error::OutOfRange { .. }), "{err:?}");
    let vac = MaterialDispersion::vacuum();
    assert_eq!(dispersion_eval(&vac, 1e10).unwrap(), Complex64::new(1.0, 0.0));
}

#[test]
fn table_file_round_trip() {
    let path = std::env::temp_dir().join(format!("biphoton-table-{}.txt", std::process::id()));
    std::fs::write(&path, "# lambda n' n''\n1000 1.5 0\n500 1.6 1e-6\n").unwrap();
    let table = MaterialDispersion::load_table(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let n = dispersion_eval(&table, omega_from_wavelength(500e-9)).unwrap();
    assert_relative_eq!(n.re, 1.6, epsilon = 1e-12);
    assert_relative_eq!(n.im, 1e-6, epsilon = 1e-18);
    // halfway in ω, not in λ
    let mid = 0.5 * (omega_from_wavelength(500e-9) + omega_from_wavelength(1000e-9));
    assert_relative_eq!(dispersion_eval(&table, mid).unwrap().re, 1.55, epsilon = 1e-12);
}

#[test]
fn table_parse_errors_carry_position() {
    let err = MaterialDispersion::parse_table("t", "500 1.6 0\n600 x 0\n").unwrap_err();
    match err {
        Error::Parse { line, column, .. } => assert_eq!((line, column), (2, 5)),
        other => panic!("unexpected {other:?}"),
    }
    assert!(MaterialDispersion::parse_table("t", "500 1.6 -1e-3\n").is_err());
}

#[test]
fn wave_number_hand_value() {
    let kin = kinematics(OMEGA, Complex64::new(1.67, 0.0), Transverse::zeros());
    assert_relative_eq!(kin.k.re, 1.67 * OMEGA / C, max_relative = 1e-15);
    assert!((kin.k.re - 1.971e7).abs() / 1.971e7 < 1e-3);
    assert_eq!(kin.kz, kin.k);
    assert_eq!(kin.qz.re, OMEGA / C);
}

#[test]
fn absorbing_noise_factor_hand_value() {
    let n = Complex64::new(1.67, 1e-3);
    let a = noise_factor(n * n).unwrap();
    assert!((a.re - 1.0 - 6.4e-7).abs() < 0.05e-7, "{a}");
    assert!((a.im + 9.52e-4).abs() < 0.01e-4, "{a}");
}

#[test]
fn local_field_hand_values() {
    let eps0 = biphoton::constants::EPSILON_0;
    let scaled = |n: f64| local_field(Complex64::new(n * n, 0.0)).unwrap().re * 4.5 * eps0;
    assert!((scaled(1.67) - 0.64144).abs() < 1e-5);
    assert!((scaled(1.75) - 0.67347).abs() < 1e-5);
    assert!(local_field(Complex64::new(0.0, 0.0)).is_err());
}

proptest! {
    #[test]
    fn dispersion_relation_and_branch(
        nr in 1.0f64..3.0,
        ni in 0.0f64..1e-2,
        frac in 0.0f64..2.0,
        phi in 0.0f64..std::f64::consts::TAU,
    ) {
        let q = OMEGA / C;
        let kp = Transverse::new(phi.cos(), phi.sin()) * (frac * q);
        let kin = kinematics(OMEGA, Complex64::new(nr, ni), kp);
        let kp2 = kp.norm_squared();
        let lhs = kin.kz * kin.kz + kp2;
        prop_assert!((lhs - kin.k * kin.k).norm() <= 1e-12 * kin.k.norm_sqr());
        prop_assert!(((kin.qz * kin.qz).re + kp2 - q * q).abs() <= 1e-12 * q * q);
        prop_assert!(kin.kz.im >= 0.0);
        prop_assert!(kin.qz.im >= 0.0);
    }

    #[test]
    fn te_coefficients_match_boundary_solution(
        nr in 1.2f64..2.5,
        ni in 0.0f64..1e-2,
        frac in 0.0f64..1.5,
        len_um in 0.1f64..20.0,
    ) {
        let q = OMEGA / C;
        let n = Complex64::new(nr, ni);
        let eps = n * n;
        let length = len_um * 1e-6;
        let kin = kinematics(OMEGA, n, Transverse::new(frac * q, 0.0));
        let f = fresnel(Polarization::Te, &kin, eps, length).unwrap();
        let t_in = 2.0 * kin.qz / (kin.qz + kin.kz);
        let ours = t_in * f.t * f.m * (Complex64::i() * kin.kz * length).exp();
        let oracle = slab_transmission(kin.kz, kin.qz, Complex64::new(1.0, 0.0), length);
        prop_assert!((ours - oracle).norm() <= 1e-9 * oracle.norm().max(1e-3), "{ours} vs {oracle}");
    }

    #[test]
    fn tm_coefficients_match_boundary_solution(
        nr in 1.2f64..2.5,
        ni in 0.0f64..1e-2,
        frac in 0.0f64..1.5,
        len_um in 0.1f64..20.0,
    ) {
        let q = OMEGA / C;
        let n = Complex64::new(nr, ni);
        let eps = n * n;
        let length = len_um * 1e-6;
        let kin = kinematics(OMEGA, n, Transverse::new(0.0, frac * q));
        let f = fresnel(Polarization::Tm, &kin, eps, length).unwrap();
        // electric-field entry coefficient; the product with the exit
        // coefficient does not depend on the field convention
        let t_in = 2.0 * n * kin.qz / (kin.kz + eps * kin.qz);
        let ours = t_in * f.t * f.m * (Complex64::i() * kin.kz * length).exp();
        let oracle = slab_transmission(kin.kz, kin.qz, eps, length);
        prop_assert!((ours - oracle).norm() <= 1e-9 * oracle.norm().max(1e-3), "{ours} vs {oracle}");
    }

    #[test]
    fn lossless_slab_conserves_energy(nr in 1.2f64..2.5, frac in 0.0f64..0.99, len_um in 0.1f64..20.0) {
        let q = OMEGA / C;
        let n = Complex64::new(nr, 0.0);
        let kin = kinematics(OMEGA, n, Transverse::new(frac * q, 0.0));
        for (pol, w) in [(Polarization::Te, Complex64::new(1.0, 0.0)), (Polarization::Tm, n * n)] {
            let f = fresnel(pol, &kin, n * n, len_um * 1e-6).unwrap();
            prop_assert_eq!(f.r21, f.r23);
            let t = slab_transmission(kin.kz, kin.qz, w, len_um * 1e-6);
            prop_assert!(t.norm() <= 1.0 + 1e-12);
            // |t|² = 1 / (1 + F sin²(k_z L)) with F from the interface reflectance
            let big_r = f.r21.norm_sqr();
            let big_f = 4.0 * big_r / (1.0 - big_r).powi(2);
            let expect = 1.0 / (1.0 + big_f * (kin.kz.re * len_um * 1e-6).sin().powi(2));
            prop_assert!((t.norm_sqr() - expect).abs() < 1e-9);
        }
    }
}
