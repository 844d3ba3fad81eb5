//! Evaluation of ζ(s), Hardy's Z and the Riemann–Siegel phase θ.
//!
//! ζ is computed by Euler–Maclaurin summation with an explicit remainder
//! bound. On the critical line above `t = 1000` Hardy's Z uses the
//! Riemann–Siegel main sum with three correction terms.

use crate::error::{invalid, Error, Result};
use crate::special::{bernoulli_over_factorial, digamma_with_remainder};
use crate::zeros::ZeroTable;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// A point σ + it of the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub sigma: f64,
    pub t: f64,
}

impl ComplexPoint {
    pub fn new(sigma: f64, t: f64) -> Self {
        Self { sigma, t }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.sigma, self.t)
    }

    pub fn conj(self) -> Self {
        Self::new(self.sigma, -self.t)
    }

    fn check_finite(self) -> Result<()> {
        if self.sigma.is_finite() && self.t.is_finite() {
            Ok(())
        } else {
            Err(invalid("s", "components must be finite"))
        }
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }
}

/// Target absolute accuracy and a cap on the Euler–Maclaurin length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalPrecision {
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl EvalPrecision {
    pub fn new(abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(abs_tol >= 100.0 * f64::EPSILON) || !abs_tol.is_finite() {
            return Err(invalid("abs_tol", format!("{abs_tol} below 100·machine epsilon")));
        }
        if max_terms == 0 || max_terms > 10_000_000 {
            return Err(invalid("max_terms", format!("{max_terms} outside [1, 10^7]")));
        }
        Ok(Self { abs_tol, max_terms })
    }
}

impl Default for EvalPrecision {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_terms: 10_000_000,
        }
    }
}

/// A value of ζ with its remainder bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaValue {
    pub value: Complex64,
    pub error: f64,
    pub terms: usize,
}

/// ζ together with ζ′ from the termwise differentiated expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaWithDerivative {
    pub value: Complex64,
    pub derivative: Complex64,
    pub error: f64,
    pub derivative_error: f64,
}

const MAX_CORRECTIONS: usize = 60;
const T_LIMIT: f64 = 1e6;

fn em_coefficients() -> &'static [f64] {
    static C: OnceLock<Vec<f64>> = OnceLock::new();
    C.get_or_init(|| (1..=MAX_CORRECTIONS + 1).map(bernoulli_over_factorial).collect())
}

fn check_zeta_domain(s: ComplexPoint) -> Result<()> {
    s.check_finite()?;
    if s.sigma == 1.0 && s.t == 0.0 {
        return Err(Error::Pole("s = 1".into()));
    }
    if s.t.abs() > T_LIMIT {
        return Err(Error::OutOfRange {
            value: s.t,
            lo: -T_LIMIT,
            hi: T_LIMIT,
        });
    }
    Ok(())
}

/// ζ(s) by Euler–Maclaurin summation.
pub fn zeta(s: ComplexPoint, prec: &EvalPrecision) -> Result<ZetaValue> {
    let r = euler_maclaurin(s, prec, false)?;
    Ok(ZetaValue {
        value: r.value,
        error: r.error,
        terms: r.terms,
    })
}

/// ζ(s) and ζ′(s).
pub fn zeta_with_derivative(s: ComplexPoint, prec: &EvalPrecision) -> Result<ZetaWithDerivative> {
    let r = euler_maclaurin(s, prec, true)?;
    Ok(ZetaWithDerivative {
        value: r.value,
        derivative: r.derivative,
        error: r.error,
        derivative_error: r.derivative_error,
    })
}

/// log|ζ(s)| with the propagated error bound.
pub fn log_abs_zeta(s: ComplexPoint, prec: &EvalPrecision) -> Result<(f64, f64)> {
    let z = zeta(s, prec)?;
    let m = z.value.norm();
    if m <= z.error {
        return Err(Error::Diagnostic(format!(
            "|ζ| = {m:.3e} not resolved at σ = {}, t = {}",
            s.sigma, s.t
        )));
    }
    Ok((m.ln(), z.error / (m - z.error)))
}

struct EmResult {
    value: Complex64,
    derivative: Complex64,
    error: f64,
    derivative_error: f64,
    terms: usize,
}

fn euler_maclaurin(s: ComplexPoint, prec: &EvalPrecision, with_derivative: bool) -> Result<EmResult> {
    check_zeta_domain(s)?;
    let z = s.to_complex();
    let coeffs = em_coefficients();
    let modulus = z.norm();
    let mut n_cut = ((1.6 * modulus / (2.0 * PI)).ceil() as usize + 5).max(10);
    loop {
        if n_cut > prec.max_terms {
            return Err(Error::NonConvergence(format!(
                "Euler–Maclaurin needs more than {} terms at σ = {}, t = {}",
                prec.max_terms, s.sigma, s.t
            )));
        }
        if let Some(r) = em_attempt(z, n_cut, coeffs, prec.abs_tol, with_derivative) {
            return Ok(r);
        }
        n_cut *= 2;
    }
}

fn em_attempt(z: Complex64, n_cut: usize, coeffs: &[f64], tol: f64, with_derivative: bool) -> Option<EmResult> {
    let big_n = n_cut as f64;
    let ln_n = big_n.ln();
    let n_pow = (-z * ln_n).exp();

    // Tail corrections first, so a failing cut-off costs nothing.
    let mut corr = Complex64::new(0.0, 0.0);
    let mut dcorr = Complex64::new(0.0, 0.0);
    let mut poch = z;
    let mut dlog_poch = z.inv();
    let mut npow_k = n_pow / big_n;
    let n2 = big_n * big_n;
    let mut converged = None;
    for k in 1..=MAX_CORRECTIONS {
        let term = poch * npow_k * coeffs[k - 1];
        corr += term;
        if with_derivative {
            dcorr += term * (dlog_poch - ln_n);
        }
        // Next term and the classical remainder factor |s+2k+1|/(σ+2k+1).
        let j = (2 * k - 1) as f64;
        let a = z + j;
        let b = z + j + 1.0;
        let next_poch = poch * a * b;
        let next = (next_poch * (npow_k / n2) * coeffs[k]).norm();
        let denom = z.re + (2 * k + 1) as f64;
        if denom > 0.0 {
            let bound = next * (z + (2 * k + 1) as f64).norm() / denom;
            if bound.is_finite() && bound < tol {
                converged = Some((k, bound));
                break;
            }
        }
        dlog_poch += a.inv() + b.inv();
        poch = next_poch;
        npow_k /= n2;
    }
    let (kk, bound) = converged?;

    let mut sum = Complex64::new(0.0, 0.0);
    let mut dsum = Complex64::new(0.0, 0.0);
    for n in 1..n_cut {
        let ln = (n as f64).ln();
        let term = (-z * ln).exp();
        sum += term;
        if with_derivative {
            dsum -= term * ln;
        }
    }
    let zm1 = z - 1.0;
    let head = n_pow * big_n / zm1;
    let value = sum + head + 0.5 * n_pow + corr;
    let mut derivative = Complex64::new(0.0, 0.0);
    if with_derivative {
        derivative = dsum - head * ln_n - head / zm1 - 0.5 * n_pow * ln_n + dcorr;
    }
    let rounding = 4.0 * f64::EPSILON * (n_cut as f64) * (1.0 + value.norm());
    Some(EmResult {
        value,
        derivative,
        error: bound + rounding,
        derivative_error: (bound + rounding) * (ln_n + 2.0 * kk as f64),
        terms: n_cut,
    })
}

/// Riemann–Siegel θ(t) from its asymptotic expansion, t ≥ 10.
pub fn rs_theta(t: f64) -> Result<f64> {
    if !(t >= 10.0) || !t.is_finite() {
        return Err(invalid("t", format!("{t} < 10, expansion unreliable")));
    }
    Ok(theta_series(t))
}

fn theta_series(t: f64) -> f64 {
    let r = 1.0 / t;
    let r2 = r * r;
    0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t - PI / 8.0
        + r * (1.0 / 48.0 + r2 * (7.0 / 5760.0 + r2 * (31.0 / 80640.0 + r2 * (127.0 / 430080.0 + r2 * 511.0 / 1216512.0))))
}

/// How a Hardy Z value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZMethod {
    EulerMaclaurin,
    RiemannSiegel,
}

/// Hardy's Z(t) with its error estimate and imaginary residue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyZ {
    pub value: f64,
    pub imag_residue: f64,
    pub error: f64,
    pub method: ZMethod,
}

/// Ordinate above which Z is evaluated by the Riemann–Siegel formula.
pub const RS_THRESHOLD: f64 = 1000.0;

/// Z(t) = e^{iθ(t)} ζ(1/2 + it), t ≥ 10.
pub fn hardy_z(t: f64, prec: &EvalPrecision) -> Result<HardyZ> {
    if !(t >= 10.0) || !t.is_finite() {
        return Err(invalid("t", format!("{t} < 10")));
    }
    if t > T_LIMIT {
        return Err(Error::OutOfRange {
            value: t,
            lo: 10.0,
            hi: T_LIMIT,
        });
    }
    if t > RS_THRESHOLD {
        return Ok(riemann_siegel_z(t));
    }
    let zv = zeta(ComplexPoint::new(0.5, t), prec)?;
    let rot = Complex64::from_polar(1.0, theta_series(t)) * zv.value;
    let allowed = 10.0 * prec.abs_tol + 1e-12 * (1.0 + zv.value.norm());
    if rot.im.abs() > allowed {
        return Err(Error::Diagnostic(format!(
            "imaginary residue {:.3e} of Z at t = {t} exceeds {allowed:.3e}",
            rot.im
        )));
    }
    Ok(HardyZ {
        value: rot.re,
        imag_residue: rot.im,
        error: zv.error + 1e-12 * zv.value.norm(),
        method: ZMethod::EulerMaclaurin,
    })
}

/// Taylor coefficients of Ψ(p) = cos 2π(p² − p − 1/16) / cos 2πp about p = 1/2.
fn psi_taylor() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        const RADIUS: f64 = 1.5;
        const POINTS: usize = 256;
        const KEEP: usize = 80;
        let vals: Vec<Complex64> = (0..POINTS)
            .map(|j| {
                let w = Complex64::from_polar(RADIUS, 2.0 * PI * j as f64 / POINTS as f64);
                let p = w + 0.5;
                let q = p * p - p - 1.0 / 16.0;
                (q * 2.0 * PI).cos() / (p * 2.0 * PI).cos()
            })
            .collect();
        (0..KEEP)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, v) in vals.iter().enumerate() {
                    acc += v * Complex64::from_polar(1.0, -2.0 * PI * (k * j) as f64 / POINTS as f64);
                }
                acc.re / POINTS as f64 / RADIUS.powi(k as i32)
            })
            .collect()
    })
}

/// d^m/dp^m Ψ at p, via the Taylor series about 1/2.
fn psi_derivative(p: f64, m: usize) -> f64 {
    let c = psi_taylor();
    let x = p - 0.5;
    let mut acc = 0.0;
    for j in (m..c.len()).rev() {
        let mut fall = 1.0;
        for i in 0..m {
            fall *= (j - i) as f64;
        }
        acc = acc * x + c[j] * fall;
    }
    acc
}

fn riemann_siegel_z(t: f64) -> HardyZ {
    let tau = (t / (2.0 * PI)).sqrt();
    let m = tau.floor() as usize;
    let p = tau - m as f64;
    let th = theta_series(t);
    let mut main = 0.0;
    for n in 1..=m {
        let nf = n as f64;
        main += (th - t * nf.ln()).cos() / nf.sqrt();
    }
    main *= 2.0;
    let c0 = psi_derivative(p, 0);
    let c1 = -psi_derivative(p, 3) / (96.0 * PI * PI);
    let c2 = psi_derivative(p, 2) / (64.0 * PI * PI)
        + psi_derivative(p, 6) / (18432.0 * PI.powi(4));
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    let corr = sign * tau.powf(-0.5) * (c0 + c1 / tau + c2 / (tau * tau));
    // |C3| stays below 0.01 on [0, 1].
    let error = 0.01 * tau.powf(-3.5) + 1e-13 * m as f64;
    HardyZ {
        value: main + corr,
        imag_residue: 0.0,
        error,
        method: ZMethod::RiemannSiegel,
    }
}

/// ζ′/ζ(s) from the zero-sum identity, its remainder bound and the zeros used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDerivative {
    pub value: Complex64,
    pub remainder: f64,
    pub zeros_used: usize,
}

/// ζ′/ζ(s) = −1/s − 1/(s−1) + ½ log π − ½ ψ(s/2) + Σ_ρ 1/(s−ρ).
///
/// The ρ-sum is taken explicitly over pairs with |γ − t| ≤ `window`; the
/// remaining zeros are replaced by the smooth density θ′(γ)/π with boundary
/// corrections read from the table, and the rest is bounded through sup |S|.
pub fn zeta_log_derivative(s: ComplexPoint, table: &ZeroTable, window: f64) -> Result<LogDerivative> {
    s.check_finite()?;
    if !(s.sigma > 0.5 && s.sigma <= 2.0) {
        return Err(invalid("sigma", format!("{} outside (1/2, 2]", s.sigma)));
    }
    if !(window > 0.0) {
        return Err(invalid("window", "must be positive"));
    }
    let flip = s.t < 0.0;
    let sp = if flip { s.conj() } else { s };
    let z = sp.to_complex();
    let zs = table.zero_pair_sum(z, window)?;
    let psi = digamma_with_remainder(z * 0.5);
    let value = -z.inv() - (z - 1.0).inv() + 0.5 * PI.ln() - 0.5 * psi.value + zs.explicit + zs.model;
    let value = if flip { value.conj() } else { value };
    Ok(LogDerivative {
        value,
        remainder: zs.remainder + 0.5 * psi.remainder,
        zeros_used: zs.explicit_count,
    })
}
