//! Complex digamma, trigamma and log-gamma via shifted Stirling series.
//!
//! Arguments are shifted upward until `Re z >= 1` and `|z| >= 15`, then the
//! asymptotic series is summed through `B_20`; the first omitted term is
//! reported as the remainder.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Even Bernoulli numbers B_2 .. B_22.
const BERNOULLI_EVEN: [f64; 11] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
];

const TERMS: usize = 10;
const SHIFT_MODULUS: f64 = 15.0;

/// A value together with a bound on its truncation remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WithRemainder<T> {
    pub value: T,
    pub remainder: f64,
}

fn needs_shift(z: Complex64) -> bool {
    z.re < 1.0 || z.norm() < SHIFT_MODULUS
}

/// ψ(z) = Γ'(z)/Γ(z).
pub fn digamma(z: Complex64) -> Complex64 {
    digamma_with_remainder(z).value
}

pub fn digamma_with_remainder(mut z: Complex64) -> WithRemainder<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    while needs_shift(z) {
        acc -= z.inv();
        z += 1.0;
    }
    let w = z.inv();
    let w2 = w * w;
    let mut series = Complex64::new(0.0, 0.0);
    let mut wp = w2;
    for (k, b) in BERNOULLI_EVEN.iter().take(TERMS).enumerate() {
        series += wp * (*b / (2.0 * (k + 1) as f64));
        wp *= w2;
    }
    let remainder = (BERNOULLI_EVEN[TERMS] / (2.0 * (TERMS + 1) as f64)).abs() * wp.norm();
    WithRemainder {
        value: acc + z.ln() - 0.5 * w - series,
        remainder,
    }
}

/// ψ₁(z) = Σ_{n≥0} (z+n)^{-2}.
pub fn trigamma(z: Complex64) -> Complex64 {
    trigamma_with_remainder(z).value
}

pub fn trigamma_with_remainder(mut z: Complex64) -> WithRemainder<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    while needs_shift(z) {
        let w = z.inv();
        acc += w * w;
        z += 1.0;
    }
    let w = z.inv();
    let w2 = w * w;
    let mut series = Complex64::new(0.0, 0.0);
    let mut wp = w2 * w;
    for b in BERNOULLI_EVEN.iter().take(TERMS) {
        series += wp * *b;
        wp *= w2;
    }
    WithRemainder {
        value: acc + w + 0.5 * w2 + series,
        remainder: BERNOULLI_EVEN[TERMS].abs() * wp.norm(),
    }
}

/// log Γ(z) on the branch continuous in the right half-plane.
pub fn ln_gamma(mut z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    while needs_shift(z) {
        acc -= z.ln();
        z += 1.0;
    }
    let w = z.inv();
    let w2 = w * w;
    let mut series = Complex64::new(0.0, 0.0);
    let mut wp = w;
    for (k, b) in BERNOULLI_EVEN.iter().take(TERMS).enumerate() {
        let m = 2.0 * (k + 1) as f64;
        series += wp * (*b / (m * (m - 1.0)));
        wp *= w2;
    }
    acc + (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series
}

/// B_{2k}/(2k)! for k ≥ 1, through ζ(2k).
pub fn bernoulli_over_factorial(k: usize) -> f64 {
    assert!(k >= 1);
    let two_k = 2 * k as i32;
    let zeta = if k == 1 {
        PI * PI / 6.0
    } else {
        let mut s = 0.0;
        for n in (1..=1000).rev() {
            s += (n as f64).powi(-two_k);
        }
        s + 1000.5f64.powi(1 - two_k) / (two_k - 1) as f64
    };
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    sign * 2.0 * zeta / (2.0 * PI).powi(two_k)
}

/// The exact Riemann–Siegel phase θ(t) = arg Γ(1/4 + it/2) − (t/2) log π.
pub fn theta_exact(t: f64) -> f64 {
    ln_gamma(Complex64::new(0.25, 0.5 * t)).im - 0.5 * t * PI.ln()
}

/// θ'(t) = ½ Re ψ(1/4 + it/2) − ½ log π.
pub fn theta_prime(t: f64) -> f64 {
    0.5 * digamma(Complex64::new(0.25, 0.5 * t)).re - 0.5 * PI.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    #[test]
    fn digamma_real_values() {
        assert_abs_diff_eq!(digamma(Complex64::new(1.0, 0.0)).re, -EULER_GAMMA, epsilon = 1e-14);
        let quarter = -EULER_GAMMA - PI / 2.0 - 3.0 * 2f64.ln();
        assert_abs_diff_eq!(digamma(Complex64::new(0.25, 0.0)).re, quarter, epsilon = 1e-13);
    }

    #[test]
    fn digamma_recurrence_and_trigamma_derivative() {
        let z = Complex64::new(0.3, 7.2);
        let lhs = digamma(z + 1.0) - digamma(z);
        assert!((lhs - z.inv()).norm() < 1e-13);
        let h = 1e-4;
        let fd = (digamma(z + h) - digamma(z - h)) / (2.0 * h);
        assert!((fd - trigamma(z)).norm() < 1e-7);
        let zeta2 = PI * PI / 6.0;
        assert_abs_diff_eq!(trigamma(Complex64::new(1.0, 0.0)).re, zeta2, epsilon = 1e-13);
    }

    #[test]
    fn log_gamma_matches_factorials() {
        let v = ln_gamma(Complex64::new(10.0, 0.0)).re;
        assert_abs_diff_eq!(v, 362880f64.ln(), epsilon = 1e-12);
        let half = ln_gamma(Complex64::new(0.5, 0.0)).re;
        assert_abs_diff_eq!(half, 0.5 * PI.ln(), epsilon = 1e-13);
    }

    #[test]
    fn bernoulli_ratios() {
        assert_abs_diff_eq!(bernoulli_over_factorial(1), 1.0 / 12.0, epsilon = 1e-15);
        assert_abs_diff_eq!(bernoulli_over_factorial(2), -1.0 / 720.0, epsilon = 1e-17);
        assert_abs_diff_eq!(bernoulli_over_factorial(3), 1.0 / 30240.0, epsilon = 1e-18);
    }

    #[test]
    fn theta_prime_matches_difference_quotient() {
        for &t in &[5.0, 50.0, 500.0] {
            let h = 1e-3;
            let fd = (theta_exact(t + h) - theta_exact(t - h)) / (2.0 * h);
            assert_abs_diff_eq!(fd, theta_prime(t), epsilon = 1e-7);
        }
    }
}
