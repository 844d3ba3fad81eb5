//! The Guinand–Weil explicit formula evaluated on translates u ↦ F±(u − t),
//! and the zero-count sandwich that follows from it.
//!
//! For f(u) = F(u − t) the identity reads
//!
//! ```text
//! Σ_ρ f(γ) = f(i/2) + f(−i/2) + (1/2π)∫ f(u) Re ψ(¼ + iu/2) du
//!            − (log π / 2π) f̂(0) − (1/π) Re Σ_n Λ(n) n^{−½−it} F̂(log n / 2π)
//! ```

use crate::arith::MangoldtTable;
use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate, QuadConfig};
use crate::selberg::{SelbergPair, Sign};
use crate::special::digamma;
use crate::zeros::ZeroTable;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Slack added to the smooth zero density log(γ/2π)/2π in tail bounds.
pub(crate) const DENSITY_SLACK: f64 = 0.01;

/// |Re ψ(¼ + iy)| ≤ log(1 + |y|) + this.
const DIGAMMA_OFFSET: f64 = 4.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplicitConfig {
    /// Use only zeros with |γ − t| ≤ window on the direct side.
    pub zero_window: Option<f64>,
    /// Reject when the bound on the omitted zeros exceeds this.
    pub max_zero_tail: f64,
    /// Half-width of the archimedean quadrature range; `None` picks
    /// max(2000, 50h).
    pub arch_half_width: Option<f64>,
    pub quad: QuadConfig,
}

impl Default for ExplicitConfig {
    fn default() -> Self {
        Self {
            zero_window: None,
            max_zero_tail: 1e-3,
            arch_half_width: None,
            quad: QuadConfig {
                abs_tol: 1e-9,
                rel_tol: 0.0,
                max_intervals: 200_000,
            },
        }
    }
}

/// Every term of the explicit formula at one translate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GuinandWeilReport {
    pub sign: Sign,
    pub t_center: f64,
    pub zero_side: f64,
    pub zeros_used: usize,
    /// Bound on the zeros left out of `zero_side`.
    pub zero_tail_bound: f64,
    pub pole_terms: f64,
    /// (1/2π) ∫ F(u − t) Re ψ(¼ + iu/2) du.
    pub archimedean: f64,
    pub archimedean_error: f64,
    pub archimedean_tail_bound: f64,
    /// (log π / 2π) F̂(0).
    pub log_pi_term: f64,
    /// (1/π) Re Σ Λ(n) n^{−½−it} F̂(log n / 2π).
    pub prime_side: f64,
    pub prime_terms: usize,
    /// zero side minus the right side.
    pub residual: f64,
}

impl GuinandWeilReport {
    pub fn right_side(&self) -> f64 {
        self.pole_terms + self.archimedean - self.log_pi_term - self.prime_side
    }

    /// Sum of the bounds that the residual is allowed to absorb.
    pub fn error_budget(&self) -> f64 {
        self.zero_tail_bound + self.archimedean_error + self.archimedean_tail_bound
    }
}

/// ∫_b^∞ log(γ/q) / (γ − c)² dγ for b > c.
pub(crate) fn log_over_square_tail(b: f64, c: f64, q: f64) -> f64 {
    let d = b - c;
    let second = if c.abs() < 1e-9 * b {
        1.0 / b
    } else {
        (b / d).ln() / c
    };
    (b / q).ln().max(0.0) / d + second.max(0.0)
}

fn envelope_constant(pair: &SelbergPair) -> f64 {
    1.5 / (PI * PI * pair.delta() * pair.delta())
}

/// Bound on Σ_{γ > b} F(±γ − t) through the decay envelope and the zero
/// density, with `s_bound` controlling the counting-function fluctuation.
fn upper_zero_tail(pair: &SelbergPair, t: f64, b: f64, s_bound: f64) -> f64 {
    let k = envelope_constant(pair);
    let h = pair.h();
    let mut total = 0.0;
    for c in [t + h, h - t] {
        let b_eff = b.max(2.0 * PI);
        if b_eff <= c {
            return f64::INFINITY;
        }
        let density = log_over_square_tail(b_eff, c, 2.0 * PI) / (2.0 * PI) + DENSITY_SLACK / (b_eff - c);
        total += k * density + 2.0 * s_bound * k / ((b_eff - c) * (b_eff - c));
    }
    total
}

/// Bound on Σ_{0 < γ < t − w} F(γ − t).
fn lower_zero_tail(pair: &SelbergPair, t: f64, w: f64, s_bound: f64) -> f64 {
    if t - w <= 0.0 {
        return 0.0;
    }
    let k = envelope_constant(pair);
    let r = w - pair.h();
    let density = (t / (2.0 * PI)).ln().max(0.0) / (2.0 * PI) + DENSITY_SLACK;
    k * density / r + 2.0 * s_bound * k / (r * r)
}

fn validate_center(t: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid("t_center", format!("{t} must be positive and finite")));
    }
    Ok(())
}

/// Σ over table zeros of F(γ − t) + F(−γ − t) together with a bound on
/// everything omitted.
pub fn zero_side(
    pair: &SelbergPair,
    sign: Sign,
    t: f64,
    table: &ZeroTable,
    window: Option<f64>,
) -> Result<(f64, usize, f64)> {
    validate_center(t)?;
    let (_, hi) = table.span().ok_or(Error::EmptyTable)?;
    let s_far = (2.0 * table.s_sup()).max(1.0);
    let h = pair.h();
    match window {
        None => {
            let mut sum = 0.0;
            for &g in table.ordinates() {
                sum += pair.eval_time(sign, g - t) + pair.eval_time(sign, -g - t);
            }
            Ok((sum, table.len(), upper_zero_tail(pair, t, hi, s_far)))
        }
        Some(w) => {
            if !(w > h) {
                return Err(invalid("zero_window", format!("{w} must exceed h = {h}")));
            }
            table.require(t - w, t + w)?;
            let near = table.between(t - w, t + w);
            let mut sum = 0.0;
            for &g in near {
                sum += pair.eval_time(sign, g - t);
            }
            for &g in table.ordinates() {
                sum += pair.eval_time(sign, -g - t);
            }
            // Zeros above t + w: the envelope bound only involves γ − t, so
            // the positive-side tail from t + w and the mirrored tail from hi.
            let k = envelope_constant(pair);
            let b = t + w;
            let c = t + h;
            let above = k * (log_over_square_tail(b, c, 2.0 * PI) / (2.0 * PI) + DENSITY_SLACK / (b - c))
                + 2.0 * s_far * k / ((b - c) * (b - c));
            let mirrored = {
                let c = h - t;
                let b = hi.max(2.0 * PI);
                k * (log_over_square_tail(b, c, 2.0 * PI) / (2.0 * PI) + DENSITY_SLACK / (b - c))
                    + 2.0 * s_far * k / ((b - c) * (b - c))
            };
            let tail = above + mirrored + lower_zero_tail(pair, t, w, s_far);
            Ok((sum, near.len() + table.len(), tail))
        }
    }
}

/// f(i/2) + f(−i/2) = 2 Re F(i/2 − t).
pub fn pole_terms(pair: &SelbergPair, sign: Sign, t: f64) -> f64 {
    2.0 * pair.eval_complex(sign, Complex64::new(-t, 0.5)).re
}

/// Quadrature of ∫ F(u − t) Re ψ(¼ + iu/2) du with its error estimate and a
/// bound on the part outside the integration range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArchimedeanIntegral {
    pub value: f64,
    /// (2h ± 1/Δ) log(t/2).
    pub model: f64,
    pub quadrature_error: f64,
    pub tail_bound: f64,
    pub half_width: f64,
}

impl ArchimedeanIntegral {
    pub fn gap(&self) -> f64 {
        self.value - self.model
    }
}

fn archimedean_raw(pair: &SelbergPair, sign: Sign, t: f64, half_width: Option<f64>, quad: &QuadConfig) -> Result<ArchimedeanIntegral> {
    let h = pair.h();
    let a = half_width.unwrap_or((50.0 * h).max(2000.0));
    if !(a > h) {
        return Err(invalid("arch_half_width", format!("{a} must exceed h = {h}")));
    }
    let integrand = |u: f64| {
        let f = pair.eval_time(sign, u - t);
        if f == 0.0 {
            return 0.0;
        }
        f * digamma(Complex64::new(0.25, 0.5 * u)).re
    };
    // Roughly one initial panel per oscillation of F.
    let panels = ((2.0 * a * pair.delta()).ceil() as usize).clamp(16, 20_000);
    let r = integrate(integrand, t - a, t + a, panels, quad)?;
    let k = envelope_constant(pair);
    let tt = t.abs();
    let b = a + tt + 2.0;
    let c = tt + 2.0 + h;
    let tail = 2.0 * k * (log_over_square_tail(b, c, 2.0) + DIGAMMA_OFFSET / (a - h));
    Ok(ArchimedeanIntegral {
        value: r.value,
        model: pair.eval_fourier(sign, 0.0) * (t / 2.0).ln(),
        quadrature_error: r.error,
        tail_bound: tail,
        half_width: a,
    })
}

/// ∫ F±(u − t) Re ψ(¼ + iu/2) du and the model (2h ± 1/Δ) log(t/2).
pub fn archimedean_integral(t: f64, pair: &SelbergPair, sign: Sign) -> Result<ArchimedeanIntegral> {
    archimedean_integral_with(t, pair, sign, &ExplicitConfig::default())
}

pub fn archimedean_integral_with(t: f64, pair: &SelbergPair, sign: Sign, cfg: &ExplicitConfig) -> Result<ArchimedeanIntegral> {
    if !(t >= 4.0 && t.is_finite()) {
        return Err(invalid("t", format!("{t} must be at least 4")));
    }
    if pair.delta() < 1.0 {
        return Err(invalid("delta", format!("{} must be at least 1", pair.delta())));
    }
    if pair.h() > t.sqrt() {
        return Err(invalid("h", format!("{} exceeds sqrt(t) = {}", pair.h(), t.sqrt())));
    }
    archimedean_raw(pair, sign, t, cfg.arch_half_width, &cfg.quad)
}

/// (1/π) Re Σ_{n ≤ limit} Λ(n) n^{−½−it} F̂(log n / 2π). Terms with
/// log n / 2π ≥ Δ are exactly zero, so any limit past e^{2πΔ} gives the
/// same value.
pub fn prime_side(pair: &SelbergPair, sign: Sign, t: f64, mangoldt: &MangoldtTable, limit: u64) -> Result<(f64, usize)> {
    let powers = mangoldt.prime_powers_upto(limit)?;
    let mut sum = 0.0;
    for &(n, lp) in &powers {
        let ln = (n as f64).ln();
        let fh = pair.eval_fourier(sign, ln / (2.0 * PI));
        sum += lp / (n as f64).sqrt() * (t * ln).cos() * fh;
    }
    Ok((sum / PI, powers.len()))
}

/// The largest n that can carry a non-zero prime term.
pub fn support_limit(pair: &SelbergPair) -> u64 {
    (2.0 * PI * pair.delta()).exp().floor() as u64
}

/// Both sides of the explicit formula for u ↦ F±(u − t_center).
pub fn guinand_weil(
    pair: &SelbergPair,
    sign: Sign,
    t_center: f64,
    table: &ZeroTable,
    mangoldt: &MangoldtTable,
    cfg: &ExplicitConfig,
) -> Result<GuinandWeilReport> {
    validate_center(t_center)?;
    let (zs, used, zero_tail) = zero_side(pair, sign, t_center, table, cfg.zero_window)?;
    if zero_tail > cfg.max_zero_tail {
        let (lo, hi) = table.span().ok_or(Error::EmptyTable)?;
        return Err(Error::Coverage {
            need_lo: lo,
            need_hi: f64::INFINITY,
            have_lo: lo,
            have_hi: hi,
        });
    }
    let limit = support_limit(pair);
    let (ps, terms) = prime_side(pair, sign, t_center, mangoldt, limit)?;
    let arch = archimedean_raw(pair, sign, t_center, cfg.arch_half_width, &cfg.quad)?;
    let poles = pole_terms(pair, sign, t_center);
    let log_pi = PI.ln() / (2.0 * PI) * pair.eval_fourier(sign, 0.0);
    let mut report = GuinandWeilReport {
        sign,
        t_center,
        zero_side: zs,
        zeros_used: used,
        zero_tail_bound: zero_tail,
        pole_terms: poles,
        archimedean: arch.value / (2.0 * PI),
        archimedean_error: arch.quadrature_error / (2.0 * PI),
        archimedean_tail_bound: arch.tail_bound / (2.0 * PI),
        log_pi_term: log_pi,
        prime_side: ps,
        prime_terms: terms,
        residual: 0.0,
    };
    report.residual = zs - report.right_side();
    Ok(report)
}

/// |zero side − right side| with the default configuration.
pub fn guinand_weil_residual(pair: &SelbergPair, sign: Sign, t_center: f64, table: &ZeroTable, mangoldt: &MangoldtTable) -> Result<f64> {
    Ok(guinand_weil(pair, sign, t_center, table, mangoldt, &ExplicitConfig::default())?
        .residual
        .abs())
}

/// Bounds on N(t+h) − N(t−h) − (h/π) log(t/2π) from the prime sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichResult {
    pub t: f64,
    pub h: f64,
    pub delta: f64,
    /// −log t / (2πΔ) − prime_sum_minus.
    pub lower: f64,
    /// log t / (2πΔ) − prime_sum_plus.
    pub upper: f64,
    /// (1/π) Re Σ_{p ≤ e^{2πΔ}} log p · p^{−½−it} F̂₊(log p / 2π).
    pub prime_sum_plus: f64,
    pub prime_sum_minus: f64,
    /// Exact right side minus the simplified majorant, plus side.
    pub gap_plus: f64,
    /// Exact right side minus the simplified minorant, minus side.
    pub gap_minus: f64,
    /// max(|gap_plus|, |gap_minus|) plus the quadrature bounds.
    pub residual_budget: f64,
    /// max over primes of |(log p / π) F̂±(log p / 2π)|.
    pub coefficient_max: f64,
    pub window_count: usize,
    /// window_count − (h/π) log(t/2π).
    pub deviation: f64,
}

impl SandwichResult {
    pub fn holds_with(&self, budget: f64) -> bool {
        self.lower - budget <= self.deviation && self.deviation <= self.upper + budget
    }
}

/// Both signs in one pass: the prime-only sums, the sums over all prime
/// powers, and the largest prime coefficient.
fn sandwich_prime_sums(pair: &SelbergPair, t: f64, primes: &[u32], limit: u64) -> ([f64; 2], [f64; 2], f64) {
    let mut sum = [0.0; 2];
    let mut coeff_max: f64 = 0.0;
    for &p in primes {
        let lp = (p as f64).ln();
        let (fp, fm) = pair.eval_fourier_both(lp / (2.0 * PI));
        coeff_max = coeff_max.max((lp / PI * fp).abs()).max((lp / PI * fm).abs());
        let w = lp / (p as f64).sqrt() * (t * lp).cos();
        sum[0] += w * fp;
        sum[1] += w * fm;
    }
    let mut powers = [0.0; 2];
    for &p in primes {
        let p = p as u64;
        if p.saturating_mul(p) > limit {
            break;
        }
        let lp = (p as f64).ln();
        let mut q = p * p;
        while q <= limit {
            let lq = (q as f64).ln();
            let (fp, fm) = pair.eval_fourier_both(lq / (2.0 * PI));
            let w = lp / (q as f64).sqrt() * (t * lq).cos();
            powers[0] += w * fp;
            powers[1] += w * fm;
            q = match q.checked_mul(p) {
                Some(v) => v,
                None => break,
            };
        }
    }
    let prime_only = [sum[0] / PI, sum[1] / PI];
    let full = [(sum[0] + powers[0]) / PI, (sum[1] + powers[1]) / PI];
    (prime_only, full, coeff_max)
}

pub fn zero_count_sandwich(t: f64, h: f64, delta: f64, table: &ZeroTable, mangoldt: &MangoldtTable) -> Result<SandwichResult> {
    zero_count_sandwich_with(t, h, delta, table, mangoldt, &ExplicitConfig::default())
}

pub fn zero_count_sandwich_with(
    t: f64,
    h: f64,
    delta: f64,
    table: &ZeroTable,
    mangoldt: &MangoldtTable,
    cfg: &ExplicitConfig,
) -> Result<SandwichResult> {
    if !(t >= 4.0 && t.is_finite()) {
        return Err(invalid("t", format!("{t} must be at least 4")));
    }
    if !(delta >= 2.0 && delta.is_finite()) {
        return Err(invalid("delta", format!("{delta} must be at least 2")));
    }
    if !(h > 0.0 && h <= t.sqrt()) {
        return Err(invalid("h", format!("{h} must lie in (0, sqrt(t)]")));
    }
    let pair = SelbergPair::new(h, delta)?;
    let limit = support_limit(&pair);
    let primes = mangoldt.primes_upto(limit)?;
    let mean = h / PI * (t / (2.0 * PI)).ln();
    let main = t.ln() / (2.0 * PI * delta);

    let (prime_only, full, coefficient_max) = sandwich_prime_sums(&pair, t, primes, limit);
    let mut sides = [(0.0, 0.0, 0.0); 2];
    for (slot, sign) in [Sign::Plus, Sign::Minus].into_iter().enumerate() {
        let arch = archimedean_raw(&pair, sign, t, cfg.arch_half_width, &cfg.quad)?;
        let exact = pole_terms(&pair, sign, t) + arch.value / (2.0 * PI)
            - PI.ln() / (2.0 * PI) * pair.eval_fourier(sign, 0.0)
            - full[slot];
        let simplified = mean + sign.factor() * main - prime_only[slot];
        let slack = (arch.quadrature_error + arch.tail_bound) / (2.0 * PI);
        sides[slot] = (prime_only[slot], exact - simplified, slack);
    }
    let (pp, gp, sp) = sides[0];
    let (pm, gm, sm) = sides[1];
    if coefficient_max > 4.0 {
        return Err(Error::Hypothesis(format!(
            "prime coefficient {coefficient_max} exceeds 4 at h = {h}, delta = {delta}"
        )));
    }
    let count = table.window_count(t, h)?;
    Ok(SandwichResult {
        t,
        h,
        delta,
        lower: -main - pm,
        upper: main - pp,
        prime_sum_plus: pp,
        prime_sum_minus: pm,
        gap_plus: gp,
        gap_minus: gm,
        residual_budget: gp.abs().max(gm.abs()) + sp.max(sm),
        coefficient_max,
        window_count: count,
        deviation: count as f64 - mean,
    })
}
