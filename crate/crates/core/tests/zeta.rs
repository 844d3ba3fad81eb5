mod common;

use common::zeros;
use mertens_core::error::Error;
use mertens_core::zeta::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn prec() -> EvalPrecision {
    EvalPrecision::default()
}

fn z(sigma: f64, t: f64) -> Complex64 {
    zeta(ComplexPoint::new(sigma, t), &prec()).unwrap().value
}

/// Borwein's accelerated alternating series for η(s), turned into ζ(s).
/// Weights are built in log space so that n can exceed the f64 range of
/// the raw coefficients.
fn zeta_eta_oracle(s: Complex64) -> Complex64 {
    let n = (((PI * s.im.abs() / 2.0) + 50.0) / (3.0 + 8f64.sqrt()).ln()).ceil() as usize + 10;
    // log c_i with c_i = n (n+i−1)! 4^i / ((n−i)! (2i)!)
    let lgam = |x: f64| -> f64 { ln_factorial(x) };
    let log_c: Vec<f64> = (0..=n)
        .map(|i| {
            let i_f = i as f64;
            (n as f64).ln() + lgam(n as f64 + i_f - 1.0) + i_f * 4f64.ln() - lgam(n as f64 - i_f) - lgam(2.0 * i_f)
        })
        .collect();
    let top = log_c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let c: Vec<f64> = log_c.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = c.iter().sum();
    // 1 − d_k/d_n as a suffix sum
    let mut suffix = vec![0.0; n + 2];
    for i in (0..=n).rev() {
        suffix[i] = suffix[i + 1] + c[i];
    }
    let mut eta = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let w = suffix[k + 1] / total;
        let term = (-s * ((k + 1) as f64).ln()).exp() * w;
        if k % 2 == 0 {
            eta += term;
        } else {
            eta -= term;
        }
    }
    eta / (1.0 - (Complex64::new(1.0, 0.0) - s).exp2())
}

fn ln_factorial(x: f64) -> f64 {
    // x is a non-negative integer, possibly −1 at i = 0 (giving (n−1)!)
    let m = x.round() as i64;
    (2..=m.max(1)).map(|k| (k as f64).ln()).sum()
}

#[test]
fn basel_value_from_partial_sum_oracle() {
    let n = 1_000_000u64;
    let partial: f64 = (1..=n).rev().map(|k| 1.0 / (k as f64 * k as f64)).sum();
    let nf = n as f64;
    // tail Σ_{k>N} k⁻² = 1/N − 1/(2N²) + 1/(6N³) − …
    let tail = 1.0 / nf - 0.5 / (nf * nf) + 1.0 / (6.0 * nf * nf * nf);
    let oracle = partial + tail;
    assert!((oracle - PI * PI / 6.0).abs() < 1e-14);
    let v = zeta(ComplexPoint::new(2.0, 0.0), &prec()).unwrap();
    assert!(v.error <= prec().abs_tol);
    assert!((v.value.re - oracle).abs() <= prec().abs_tol, "{} vs {oracle}", v.value);
    assert_eq!(v.value.im, 0.0);
}

#[test]
fn value_at_zero_matches_eta_oracle() {
    let v = z(0.0, 0.0);
    assert!((v.re + 0.5).abs() < 1e-12);
    assert!((zeta_eta_oracle(Complex64::new(0.0, 0.0)).re + 0.5).abs() < 1e-12);
}

#[test]
fn pole_is_rejected() {
    assert!(matches!(zeta(ComplexPoint::new(1.0, 0.0), &prec()), Err(Error::Pole(_))));
    assert!(zeta(ComplexPoint::new(0.5, 2e6), &prec()).is_err());
}

#[test]
fn agrees_with_eta_oracle_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let sigma: f64 = rng.gen_range(0.01..=2.0);
        let t: f64 = rng.gen_range(-1000.0..=1000.0);
        let a = z(sigma, t);
        let b = zeta_eta_oracle(Complex64::new(sigma, t));
        let err = (a - b).norm();
        worst = worst.max(err);
        assert!(err < 1e-8, "s = {sigma} + {t}i: {a} vs {b}");
    }
    println!("worst difference from eta oracle: {worst:.2e}");
}

#[test]
fn theta_properties() {
    assert!(matches!(rs_theta(9.99), Err(Error::InvalidParameter { .. })));
    assert!(rs_theta(100.0).unwrap() > rs_theta(50.0).unwrap());
    let t = 1e4;
    let lead = t / 2.0 * (t / (2.0 * PI)).ln() - t / 2.0 - PI / 8.0;
    assert!((rs_theta(t).unwrap() / lead - 1.0).abs() < 1e-4);
    let mut prev = rs_theta(10.0).unwrap();
    for k in 1..=10_000 {
        let cur = rs_theta(10.0 + k as f64 * 0.1).unwrap();
        assert!(cur > prev);
        prev = cur;
    }
}

#[test]
fn theta_counts_the_first_zero() {
    let g1 = zeros().ordinates()[0];
    let table = zeros();
    // N(t) = θ(t)/π + 1 + S(t) with |S| < 1 on both sides of γ₁
    for (t, count) in [(g1 - 1e-6, 0usize), (g1 + 1e-6, 1)] {
        assert_eq!(table.count_upto(t).unwrap(), count);
        let smooth = rs_theta(t).unwrap() / PI + 1.0;
        assert!((count as f64 - smooth).abs() < 1.0, "t = {t}: smooth count {smooth}");
    }
}

#[test]
fn hardy_z_sign_change_brackets_first_zero() {
    let a = hardy_z(14.0, &prec()).unwrap().value;
    let b = hardy_z(14.3, &prec()).unwrap().value;
    assert!(a * b < 0.0);
}

#[test]
fn hardy_z_modulus_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let t: f64 = rng.gen_range(10.0..1000.0);
        let hz = hardy_z(t, &prec()).unwrap();
        let m = z(0.5, t).norm_sqr();
        assert!((hz.value * hz.value - m).abs() <= 1e-6 * m.max(1e-300), "t = {t}");
        assert!(hz.imag_residue <= 10.0 * prec().abs_tol);
    }
}

#[test]
fn hardy_z_sign_changes_count_zeros_below_hundred() {
    let mut changes = 0;
    let mut prev = hardy_z(10.0, &prec()).unwrap().value;
    for k in 1..=9000 {
        let cur = hardy_z(10.0 + k as f64 * 0.01, &prec()).unwrap().value;
        if prev * cur < 0.0 {
            changes += 1;
        }
        prev = cur;
    }
    let table = zeros();
    assert_eq!(changes, table.count_upto(100.0).unwrap() - table.count_upto(10.0).unwrap());
    assert_eq!(changes, 29);
}

#[test]
fn hardy_z_methods_agree_across_the_switch() {
    for &t in &[RS_THRESHOLD - 0.5, RS_THRESHOLD + 0.5, 2500.0] {
        let hz = hardy_z(t, &prec()).unwrap();
        assert!((hz.value.powi(2) - z(0.5, t).norm_sqr()).abs() < 1e-6 * (1.0 + hz.value.powi(2)), "t = {t}");
    }
}

#[test]
fn log_derivative_matches_finite_difference() {
    let s = ComplexPoint::new(1.5, 50.0);
    let ld = zeta_log_derivative(s, zeros(), 200.0).unwrap();
    let h = 1e-5;
    let up = z(1.5 + h, 50.0).ln();
    let dn = z(1.5 - h, 50.0).ln();
    let fd = (up - dn) / (2.0 * h);
    assert!((ld.value - fd).norm() < 1e-3, "{} vs {fd}", ld.value);
}

#[test]
fn log_derivative_conjugate_symmetry() {
    let s = ComplexPoint::new(0.8, 321.0);
    let a = zeta_log_derivative(s, zeros(), 100.0).unwrap().value;
    let b = zeta_log_derivative(s.conj(), zeros(), 100.0).unwrap().value;
    assert!((a.conj() - b).norm() < 1e-12);
}

#[test]
fn log_derivative_window_growth_stays_within_remainder() {
    let s = ComplexPoint::new(0.75, 1000.0);
    let a = zeta_log_derivative(s, zeros(), 50.0).unwrap();
    let b = zeta_log_derivative(s, zeros(), 200.0).unwrap();
    assert!((a.value - b.value).norm() <= a.remainder, "{} vs remainder {}", (a.value - b.value).norm(), a.remainder);
}

#[test]
fn log_derivative_residual_within_remainder() {
    let table = zeros();
    for &(sigma, t) in &[(0.6, 200.0), (0.75, 1000.0), (1.0, 3000.0), (1.5, 50.0), (2.0, 777.0)] {
        let s = ComplexPoint::new(sigma, t);
        let ld = zeta_log_derivative(s, table, 100.0).unwrap();
        let d = zeta_with_derivative(s, &prec()).unwrap();
        let direct = d.derivative / d.value;
        assert!((ld.value - direct).norm() <= ld.remainder, "s = {s:?}: {} > {}", (ld.value - direct).norm(), ld.remainder);
    }
}

#[test]
fn log_derivative_rejects_bad_input() {
    assert!(zeta_log_derivative(ComplexPoint::new(0.5, 100.0), zeros(), 50.0).is_err());
    assert!(zeta_log_derivative(ComplexPoint::new(0.8, 100.0), zeros(), 0.0).is_err());
    assert!(matches!(
        zeta_log_derivative(ComplexPoint::new(0.8, 4990.0), zeros(), 100.0),
        Err(Error::Coverage { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn conjugate_symmetry(sigma in -1.0f64..3.0, t in 0.1f64..500.0) {
        let a = z(sigma, t);
        let b = z(sigma, -t);
        prop_assert!((a.conj() - b).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn hardy_z_is_real(t in 10.0f64..5000.0) {
        let hz = hardy_z(t, &prec()).unwrap();
        prop_assert!(hz.imag_residue <= 10.0 * prec().abs_tol);
    }

    #[test]
    fn theta_is_increasing(t in 10.0f64..1e5, dt in 1e-3f64..10.0) {
        prop_assert!(rs_theta(t + dt).unwrap() > rs_theta(t).unwrap());
    }
}
