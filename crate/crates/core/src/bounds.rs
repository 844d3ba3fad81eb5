//! Lower bounds for log|ζ| measured against numerical values: the Landau
//! identity for Σ Λ(n) n^{−z} log(x/n), the decomposition of log|ζ(σ+it)|
//! into a prime sum and the zero sum F, the typical-ordinate lower bounds,
//! the bound on |x^z/ζ(z)| and the unconditional floor.

use crate::arith::MangoldtTable;
use crate::error::{invalid, Error, Result};
use crate::explicit::{log_over_square_tail, DENSITY_SLACK};
use crate::special::trigamma;
use crate::typicality::{check_typical, lambda_weighted_sum, TypicalityParams};
use crate::zeros::ZeroTable;
use crate::zeta::{log_abs_zeta, zeta_with_derivative, ComplexPoint, EvalPrecision};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// A measured inequality: `margin` is positive when the bound holds with
/// the O-term dropped, and `o_term_scale` is the size of that O-term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginReport {
    pub point: ComplexPoint,
    pub lhs: f64,
    pub rhs_explicit: f64,
    pub margin: f64,
    pub o_term_scale: f64,
    /// Error bound on the numerical lhs.
    pub lhs_error: f64,
}

impl MarginReport {
    /// margin ≥ −guard · o_term_scale.
    pub fn within_guard(&self, guard: f64) -> bool {
        self.margin >= -guard * self.o_term_scale
    }
}

/// ζ′/ζ(z) from Euler–Maclaurin values of ζ and ζ′, with an error bound.
fn log_derivative_em(z: Complex64, prec: &EvalPrecision) -> Result<(Complex64, f64)> {
    let r = zeta_with_derivative(ComplexPoint::from(z), prec)?;
    let m = r.value.norm();
    if m <= 10.0 * r.error {
        return Err(Error::Diagnostic(format!("ζ({z}) too close to zero to divide")));
    }
    let q = r.derivative / r.value;
    let err = (r.derivative_error + q.norm() * r.error) / (m - r.error);
    Ok((q, err))
}

/// (ζ′/ζ)′(z) by central differences with step h and h/2 combined by
/// Richardson extrapolation.
fn log_derivative_prime(z: Complex64, h: f64, prec: &EvalPrecision) -> Result<(Complex64, f64)> {
    let diff = |step: f64| -> Result<(Complex64, f64)> {
        let (a, ea) = log_derivative_em(z + step, prec)?;
        let (b, eb) = log_derivative_em(z - step, prec)?;
        Ok(((a - b) / (2.0 * step), (ea + eb) / (2.0 * step)))
    };
    let (d1, e1) = diff(h)?;
    let (d2, e2) = diff(0.5 * h)?;
    let r = (d2 * 4.0 - d1) / 3.0;
    Ok((r, (r - d2).norm() + (4.0 * e2 + e1) / 3.0))
}

/// Σ_{n≥1} x^{−2n−z}/(z + 2n)².
fn trivial_zero_sum(z: Complex64, x: f64) -> Complex64 {
    if x == 1.0 {
        return trigamma(1.0 + z * 0.5) * 0.25;
    }
    let lx = x.ln();
    let xz = (-z * lx).exp();
    let mut s = Complex64::new(0.0, 0.0);
    let mut n = 1u64;
    loop {
        let w = (-2.0 * n as f64 * lx).exp();
        let term = w / ((z + 2.0 * n as f64) * (z + 2.0 * n as f64));
        s += term;
        if term.norm() < 1e-18 * s.norm().max(1e-300) || n > 50_000_000 {
            break;
        }
        n += 1;
    }
    s * xz
}

/// Both sides of the Landau identity and their difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LandauReport {
    pub point: ComplexPoint,
    pub x: f64,
    /// Σ_{n≤x} Λ(n) n^{−z} log(x/n).
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    pub log_derivative: Complex64,
    pub log_derivative_prime: Complex64,
    pub zero_sum: Complex64,
    pub zeros_used: usize,
    /// Bound on the zeros omitted from `zero_sum`.
    pub zero_tail_bound: f64,
    /// Error bound on the two ζ′/ζ terms.
    pub numerical_error: f64,
}

impl LandauReport {
    pub fn budget(&self) -> f64 {
        self.zero_tail_bound + self.numerical_error
    }
}

/// Σ_ρ x^{ρ−z}/(ρ−z)² over zeros with |γ − t| ≤ window and every mirrored
/// zero in the table, for Im z ≥ 0. The rest is bounded through the zero
/// density.
fn landau_zero_sum(z: Complex64, x: f64, table: &ZeroTable, window: f64) -> Result<(Complex64, usize, f64)> {
    let (_, hi) = table.span().ok_or(Error::EmptyTable)?;
    let t = z.im;
    let lx = x.ln();
    let s_far = (2.0 * table.s_sup()).max(1.0);
    let term = |gamma: f64| {
        let d = Complex64::new(0.5, gamma) - z;
        (d * lx).exp() / (d * d)
    };
    let upper = (t + window).min(hi);
    let lower = (t - window).max(0.0);
    table.require(lower, upper)?;
    let near = table.between(lower, upper);
    let mut sum = Complex64::new(0.0, 0.0);
    for &g in near {
        sum += term(g);
    }
    for &g in table.ordinates() {
        sum += term(-g);
    }
    let amp = x.powf(0.5 - z.re);
    let mut tail = 0.0;
    // Above the window or the table, then the mirrored zeros beyond it.
    for (b, c) in [(upper, t), (hi, -t)] {
        let b = b.max(2.0 * PI);
        if b > c {
            tail += log_over_square_tail(b, c, 2.0 * PI) / (2.0 * PI)
                + DENSITY_SLACK / (b - c)
                + 2.0 * s_far / ((b - c) * (b - c));
        }
    }
    if lower > 0.0 {
        let r = t - lower;
        tail += ((t / (2.0 * PI)).ln().max(0.0) / (2.0 * PI) + DENSITY_SLACK) / r + 2.0 * s_far / (r * r);
    }
    Ok((sum, near.len() + table.len(), amp * tail))
}

/// The full Landau identity at z with weight log(x/n).
pub fn landau_identity(z: ComplexPoint, x: f64, table: &ZeroTable, mangoldt: &MangoldtTable, window: f64) -> Result<LandauReport> {
    if !(z.sigma >= 0.0 && z.sigma.is_finite() && z.t.is_finite()) {
        return Err(invalid("z", "need Re z >= 0"));
    }
    let t_abs = z.t.abs();
    if t_abs < 100.0 {
        return Err(invalid("z", format!("|Im z| = {t_abs} below 100")));
    }
    if !(x >= 1.0 && x <= t_abs) {
        return Err(invalid("x", format!("{x} outside [1, |Im z|]")));
    }
    if !(window > 0.0) {
        return Err(invalid("window", "must be positive"));
    }
    let flip = z.t < 0.0;
    let zc = if flip { z.to_complex().conj() } else { z.to_complex() };
    let prec = EvalPrecision::default();

    let mut lhs = Complex64::new(0.0, 0.0);
    if x >= 2.0 {
        let lx = x.ln();
        for (n, lp) in mangoldt.prime_powers_upto(x.floor() as u64)? {
            let ln = (n as f64).ln();
            lhs += (-zc * ln).exp() * (lp * (lx - ln));
        }
    }
    let (q, eq) = log_derivative_em(zc, &prec)?;
    let (qp, eqp) = log_derivative_prime(zc, 1e-4, &prec)?;
    let (zs, used, tail) = landau_zero_sum(zc, x, table, window)?;
    let lx = x.ln();
    let one = Complex64::new(1.0, 0.0);
    let pole = (lx * (one - zc)).exp() / ((one - zc) * (one - zc));
    let rhs = -q * lx - qp - zs + pole - trivial_zero_sum(zc, x);
    let (lhs, rhs, q, qp, zs) = if flip {
        (lhs.conj(), rhs.conj(), q.conj(), qp.conj(), zs.conj())
    } else {
        (lhs, rhs, q, qp, zs)
    };
    Ok(LandauReport {
        point: z,
        x,
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
        log_derivative: q,
        log_derivative_prime: qp,
        zero_sum: zs,
        zeros_used: used,
        zero_tail_bound: tail,
        numerical_error: eq * lx + eqp,
    })
}

/// |lhs − rhs| of the Landau identity.
pub fn landau_identity_residual(z: ComplexPoint, x: f64, table: &ZeroTable, mangoldt: &MangoldtTable, window: f64) -> Result<f64> {
    Ok(landau_identity(z, x, table, mangoldt, window)?.residual)
}

/// log|ζ(σ+it)| against Re(prime sum) − (1 + x^{½−σ}/((σ−½) log x)) F / log x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogZetaDecomposition {
    pub sigma: f64,
    pub t: f64,
    pub x: f64,
    pub log_abs_zeta: f64,
    pub log_abs_zeta_error: f64,
    /// Re Σ_{n≤x} Λ(n) n^{−σ−it}/log n · log(x/n)/log x.
    pub prime_term: f64,
    /// F(σ+it) = Σ_ρ Re 1/(s−ρ).
    pub f_value: f64,
    pub f_remainder: f64,
    /// 1 + x^{½−σ}/((σ−½) log x).
    pub amplification: f64,
    /// amplification · F / log x.
    pub f_term: f64,
    /// log|ζ| − (prime_term − f_term).
    pub gap: f64,
}

/// x^{½−σ}/((σ−½) log x) + 1.
pub fn amplification_factor(sigma: f64, x: f64) -> f64 {
    1.0 + x.powf(0.5 - sigma) / ((sigma - 0.5) * x.ln())
}

pub fn log_zeta_decomposition(
    sigma: f64,
    t: f64,
    x: f64,
    table: &ZeroTable,
    mangoldt: &MangoldtTable,
    window: f64,
) -> Result<LogZetaDecomposition> {
    if !(sigma > 0.5 && sigma <= 2.0) {
        return Err(invalid("sigma", format!("{sigma} outside (1/2, 2]")));
    }
    if !(x >= 2.0 && x <= t.abs()) {
        return Err(invalid("x", format!("{x} outside [2, |t|]")));
    }
    let s = ComplexPoint::new(sigma, t);
    let (lz, lz_err) = log_abs_zeta(s, &EvalPrecision::default())?;
    let prime_term = lambda_weighted_sum(sigma, t, x, mangoldt)?.re;
    let f = table.f_sum(s, window)?;
    let amplification = amplification_factor(sigma, x);
    let f_term = amplification * f.value / x.ln();
    Ok(LogZetaDecomposition {
        sigma,
        t,
        x,
        log_abs_zeta: lz,
        log_abs_zeta_error: lz_err,
        prime_term,
        f_value: f.value,
        f_remainder: f.remainder,
        amplification,
        f_term,
        gap: lz - (prime_term - f_term),
    })
}

/// The two regimes of the typical lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// ½ < σ ≤ ½ + V/log T.
    Near,
    /// ½ + V/log T < σ ≤ 2.
    Far,
}

pub fn regime(sigma: f64, params: &TypicalityParams) -> Regime {
    if sigma <= 0.5 + params.v() / params.t_scale().ln() {
        Regime::Near
    } else {
        Regime::Far
    }
}

/// The explicit part of the typical lower bound for log|ζ(σ+it)|.
pub fn typical_lower_bound_rhs(sigma: f64, params: &TypicalityParams) -> (f64, f64, Regime) {
    let v = params.v();
    let d = params.delta();
    match regime(sigma, params) {
        Regime::Near => {
            let lt = params.t_scale().ln();
            let rhs = -v * ((v / lt) / (sigma - 0.5)).ln() - 2.0 * (1.0 + d) * v * v.ln().ln();
            (rhs, v / (d * d), Regime::Near)
        }
        Regime::Far => (0.0, v / d, Regime::Far),
    }
}

/// log|ζ(σ+it)| minus the typical lower bound, for t V-typical.
pub fn typical_lower_bound_margin(
    sigma: f64,
    t: f64,
    params: &TypicalityParams,
    table: &ZeroTable,
    mangoldt: &MangoldtTable,
) -> Result<MarginReport> {
    if !(sigma > 0.5 && sigma <= 2.0) {
        return Err(invalid("sigma", format!("{sigma} outside (1/2, 2]")));
    }
    let v = check_typical(t, params, table, mangoldt, 64)?;
    if !v.typical {
        return Err(Error::Hypothesis(format!(
            "t = {t} is not {}-typical: criterion {:?} fails",
            params.v(),
            v.failed_criterion
        )));
    }
    let point = ComplexPoint::new(sigma, t);
    let (lhs, err) = log_abs_zeta(point, &EvalPrecision::default())?;
    let (rhs, scale, _) = typical_lower_bound_rhs(sigma, params);
    Ok(MarginReport {
        point,
        lhs,
        rhs_explicit: rhs,
        margin: lhs - rhs,
        o_term_scale: scale,
        lhs_error: err,
    })
}

/// V log(log x / log t) + 2(1+δ)V log log V.
pub fn perron_integrand_rhs(x: f64, t: f64, v: f64, delta: f64) -> f64 {
    v * (x.ln() / t.ln()).ln() + 2.0 * (1.0 + delta) * v * v.ln().ln()
}

/// Bound on log|x^z/ζ(z)| − ½ log x at an ordinate that is V′-typical of
/// size given by `params`, with V′ = params.v() ≤ (Re z − ½) log x ≤ V.
pub fn perron_integrand_bound(
    z: ComplexPoint,
    x: f64,
    v: f64,
    params: &TypicalityParams,
    table: &ZeroTable,
    mangoldt: &MangoldtTable,
) -> Result<MarginReport> {
    let t = z.t.abs();
    let vp = params.v();
    if !(x >= t) {
        return Err(invalid("x", format!("{x} below |Im z| = {t}")));
    }
    if !(v >= vp) {
        return Err(invalid("V", format!("{v} below V' = {vp}")));
    }
    let w = (z.sigma - 0.5) * x.ln();
    if !(w >= vp - 1e-12 && w <= v + 1e-12) {
        return Err(Error::Hypothesis(format!(
            "(Re z − 1/2) log x = {w} outside [V', V] = [{vp}, {v}]"
        )));
    }
    let verdict = check_typical(t, params, table, mangoldt, 64)?;
    if !verdict.typical {
        return Err(Error::Hypothesis(format!(
            "t = {t} is not {vp}-typical: criterion {:?} fails",
            verdict.failed_criterion
        )));
    }
    let (lz, err) = log_abs_zeta(z, &EvalPrecision::default())?;
    let lhs = z.sigma * x.ln() - lz - 0.5 * x.ln();
    let rhs = perron_integrand_rhs(x, t, v, params.delta());
    Ok(MarginReport {
        point: z,
        lhs,
        rhs_explicit: rhs,
        margin: rhs - lhs,
        o_term_scale: v / (params.delta() * params.delta()),
        lhs_error: err,
    })
}

/// −(log|t|/log log|t|) log(1/(σ−½)) − 3 log|t| log log log|t| / log log|t|.
pub fn unconditional_floor(sigma: f64, t: f64) -> Result<f64> {
    if !(sigma > 0.5 && sigma <= 2.0) {
        return Err(invalid("sigma", format!("{sigma} outside (1/2, 2]")));
    }
    let ta = t.abs();
    if !(ta >= 1e3 && ta.is_finite()) {
        return Err(invalid("t", format!("|t| = {ta} below 1000")));
    }
    let l = ta.ln();
    let l2 = l.ln();
    let l3 = l2.ln();
    Ok(-(l / l2) * (1.0 / (sigma - 0.5)).ln() - 3.0 * l * l3 / l2)
}

/// log|ζ(σ+it)| minus the floor, with the error of the numerical value.
pub fn floor_excess(sigma: f64, t: f64) -> Result<(f64, f64)> {
    let floor = unconditional_floor(sigma, t)?;
    let (lz, err) = log_abs_zeta(ComplexPoint::new(sigma, t), &EvalPrecision::default())?;
    Ok((lz - floor, err))
}
