mod common;

use common::{zeros, ZERO_HEIGHT};
use mertens_core::error::Error;
use mertens_core::special::digamma;
use mertens_core::zeros::*;
use mertens_core::zeta::{hardy_z, rs_theta, zeta_with_derivative, ComplexPoint, EvalPrecision};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::io::Cursor;

#[test]
fn empty_stream_gives_empty_table() {
    let t = load_zeros(Cursor::new("")).unwrap();
    assert!(t.is_empty());
    assert_eq!(t.span(), None);
    assert!(matches!(t.count_upto(20.0), Err(Error::EmptyTable)));
    assert!(t.window_count(20.0, 1.0).is_err());
}

#[test]
fn three_line_stream() {
    let t = load_zeros(Cursor::new("14.134725\n21.022040\n25.010858")).unwrap();
    assert_eq!(t.len(), 3);
    assert_eq!(t.span(), Some((0.0, 25.010858)));
}

#[test]
fn comments_blank_lines_and_headers() {
    let text = "# source: hand\n# span: 0 30\n\n14.134725\n  # note\n21.022040\n";
    let t = load_zeros(Cursor::new(text)).unwrap();
    assert_eq!(t.source(), "hand");
    assert_eq!(t.span(), Some((0.0, 30.0)));
    assert_eq!(t.count_upto(29.0).unwrap(), 2);
}

#[test]
fn out_of_order_and_garbage_lines_are_rejected() {
    let e = load_zeros(Cursor::new("14.134725\n25.010858\n21.022040\n")).unwrap_err();
    assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
    let e = load_zeros(Cursor::new("14.134725\n\nabc\n")).unwrap_err();
    assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
    let e = load_zeros(Cursor::new("13.5\n")).unwrap_err();
    assert!(matches!(e, Error::InvalidParameter { .. }), "{e}");
}

#[test]
fn generated_first_zeros_match_bisection_values() {
    let g = zeros().ordinates();
    for (got, want) in g.iter().zip([14.134725, 21.022040, 25.010858]) {
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
    }
    for &x in &g[..3] {
        let a = hardy_z(x - 1e-6, &EvalPrecision::default()).unwrap().value;
        let b = hardy_z(x + 1e-6, &EvalPrecision::default()).unwrap().value;
        assert!(a * b < 0.0, "no sign change around {x}");
    }
}

#[test]
fn export_round_trip() {
    let t = zeros();
    let mut buf = Vec::new();
    t.export(&mut buf).unwrap();
    let back = load_zeros(Cursor::new(buf)).unwrap();
    assert_eq!(back.len(), t.len());
    assert_eq!(back.span(), t.span());
    assert_eq!(back.source(), t.source());
    assert!(back.ordinates().iter().zip(t.ordinates()).all(|(a, b)| (a - b).abs() < 1e-11));
}

#[test]
fn counts_at_fixed_heights() {
    let t = zeros();
    assert_eq!(t.count_upto(14.0).unwrap(), 0);
    let c100 = t.count_upto(100.0).unwrap();
    assert_eq!(c100, t.ordinates().iter().filter(|&&g| g <= 100.0).count());
    assert_eq!(c100, (rs_theta(100.0).unwrap() / PI).floor() as usize + 1);
    // the classical value N(1000) = 649
    assert_eq!(t.count_upto(1000.0).unwrap(), 649);
    assert!(matches!(t.count_upto(ZERO_HEIGHT + 1.0), Err(Error::Coverage { .. })));
}

#[test]
fn window_counts() {
    let t = zeros();
    let g1 = t.ordinates()[0];
    assert_eq!(t.window_count(g1, 0.5).unwrap(), 1);
    assert_eq!(t.window_count(16.0, 0.1).unwrap(), 0);
    // half-open at the left end, closed at the right end
    assert_eq!(t.window_count(g1 + 1.0, 1.0).unwrap(), 0);
    assert_eq!(t.window_count(g1 - 1.0, 1.0).unwrap(), 1);
    assert!(t.window_count(ZERO_HEIGHT, 1.0).is_err());
    assert!(t.window_count(100.0, 0.0).is_err());
}

#[test]
fn window_counts_are_prefix_differences() {
    let t = zeros();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..100 {
        let c: f64 = rng.gen_range(20.0..4900.0);
        let h: f64 = rng.gen_range(0.01..50.0);
        assert_eq!(
            t.window_count(c, h).unwrap(),
            t.count_upto(c + h).unwrap() - t.count_upto(c - h).unwrap()
        );
    }
}

#[test]
fn riemann_von_mangoldt_count() {
    let t = zeros();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let x: f64 = rng.gen_range(15.0..ZERO_HEIGHT);
        let s = t.argument_s(x).unwrap();
        assert!(s.abs() <= 3.0, "S({x}) = {s}");
    }
    println!("sup |S| = {:.4}", t.s_sup());
    assert!(t.s_sup() < 3.0);
}

#[test]
fn neighbouring_zeros_alternate_in_sign_of_z() {
    let g = zeros().ordinates();
    let p = EvalPrecision::default();
    for w in g.windows(2).step_by(97) {
        let mid = 0.5 * (w[0] + w[1]);
        let before = hardy_z(w[0] - 1e-7, &p).unwrap().value;
        let between = hardy_z(mid, &p).unwrap().value;
        let after = hardy_z(w[1] + 1e-7, &p).unwrap().value;
        assert!(before * between < 0.0 && between * after < 0.0, "around {w:?}");
    }
}

#[test]
fn f_sum_decays_for_large_sigma() {
    let t = zeros();
    let f = t.f_sum(ComplexPoint::new(10.0, 50.0), 40.0).unwrap();
    let bound = 10.0 * f.zeros_in_window as f64 / (9.5f64 * 9.5) + f.tail_estimate + f.remainder;
    assert!(f.truncated > 0.0 && f.value < bound, "{f:?}");
}

#[test]
fn f_sum_is_positive_with_a_zero_in_the_window() {
    let t = zeros();
    for &(sigma, x) in &[(0.51, 100.0), (0.7, 1234.5), (2.0, 3000.0)] {
        let f = t.f_sum(ComplexPoint::new(sigma, x), 5.0).unwrap();
        assert!(f.zeros_in_window > 0 && f.truncated > 0.0);
    }
    assert!(t.f_sum(ComplexPoint::new(0.5, 100.0), 5.0).is_err());
    assert!(t.f_sum(ComplexPoint::new(0.8, ZERO_HEIGHT - 1.0), 5.0).is_err());
}

#[test]
fn f_sum_against_log_derivative() {
    let t = zeros();
    let s = ComplexPoint::new(0.8, 500.0);
    let z = s.to_complex();
    let f = t.f_sum(s, 200.0).unwrap();
    let d = zeta_with_derivative(s, &EvalPrecision::default()).unwrap();
    let re_ld = (d.derivative / d.value).re;
    // exact: F = Re ζ′/ζ + ½ Re ψ(s/2) − ½ log π + Re(1/s + 1/(s−1))
    let exact = re_ld + 0.5 * digamma(z * 0.5).re - 0.5 * PI.ln() + (z.inv() + (z - 1.0).inv()).re;
    assert!((f.value - exact).abs() <= f.remainder, "{} vs {exact} (remainder {})", f.value, f.remainder);
    let gap = f.value - (re_ld + 0.5 * (s.t / (2.0 * PI)).ln());
    println!("F − Re ζ′/ζ − ½ log(t/2π) = {gap:.3e}");
    assert!(gap.abs() <= f.remainder + 0.01);
}

#[test]
fn deviation_from_smooth_count_is_small() {
    let d = von_mangoldt_deviation(zeros(), 200).unwrap();
    println!("max deviation from θ/π + 1: {d:.4}");
    assert!(d <= 3.0);
}

#[test]
fn synthetic_tables() {
    let t = ZeroTable::synthetic(vec![100.0, 100.5, 101.0], 90.0, 110.0, "test").unwrap();
    assert_eq!(t.window_count(100.5, 0.5).unwrap(), 2);
    assert!(ZeroTable::synthetic(vec![100.0], 101.0, 110.0, "test").is_err());
    assert!(t.count_upto(80.0).is_err());
    assert!(t.zero_pair_sum(Complex64::new(0.8, -100.0), 1.0).is_err());
}

proptest! {
    #[test]
    fn window_count_is_monotone_in_h(c in 30.0f64..4000.0, h in 0.01f64..20.0, dh in 0.0f64..20.0) {
        let t = zeros();
        prop_assert!(t.window_count(c, h + dh).unwrap() >= t.window_count(c, h).unwrap());
    }

    #[test]
    fn window_count_is_translation_consistent(c in 30.0f64..4000.0, h in 0.01f64..20.0, d in -10.0f64..10.0) {
        let t = zeros();
        let direct = t.window_count(c + d, h).unwrap();
        let shifted = t.between(c + d - h, c + d + h).iter().filter(|&&g| g > c + d - h).count();
        prop_assert_eq!(direct, shifted);
    }

    #[test]
    fn additivity_of_counts(a in 15.0f64..4900.0, len in 0.0f64..90.0) {
        let t = zeros();
        let b = a + len;
        let inside = t.ordinates().iter().filter(|&&g| g > a && g <= b).count();
        prop_assert_eq!(t.count_upto(b).unwrap() - t.count_upto(a).unwrap(), inside);
    }
}
