//! Classification of V-typical ordinates of size T.
//!
//! An ordinate t ∈ [T, 2T] is V-typical when, with x = T^{1/V},
//!
//! * (i) |Σ_{n≤x} Λ(n) n^{−σ−it} / log n · log(x/n)/log x| ≤ 2V for σ ≥ ½,
//! * (ii) every subinterval of [t−1, t+1] of length 2δπV/log T holds at most
//!   (1+δ)V ordinates,
//! * (iii) every subinterval of length 2πV/(log V · log T) holds at most V.
//!
//! Criterion (i) is checked on a σ grid over [½, 2] with a certified
//! continuity slack, plus a termwise bound beyond σ = 2. Windows longer than
//! the interval itself are clamped to [t−1, t+1].

use crate::arith::MangoldtTable;
use crate::error::{invalid, Error, Result};
use crate::zeros::ZeroTable;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// How strictly the admissible V range is enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RangePolicy {
    /// (log log T)² ≤ V ≤ log T / log log T.
    Strict,
    /// 1 < V ≤ max(log T / log log T, all-typical cap). The paper range is
    /// empty for every T reachable on a workstation.
    Desk,
}

/// Which of the three criteria failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Criterion {
    I,
    II,
    III,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypicalityParams {
    t_scale: f64,
    v: f64,
    delta: f64,
    policy: RangePolicy,
}

/// log log T.
fn ll(log_t: f64) -> f64 {
    log_t.ln()
}

/// The smallest V for which every ordinate of size T is V-typical
/// according to the all-typical threshold, rounded up.
pub fn all_typical_cap(t_scale: f64) -> Result<u32> {
    if !(t_scale >= 16.0 && t_scale.is_finite()) {
        return Err(invalid("T", format!("{t_scale} must be at least 16")));
    }
    let lt = t_scale.ln();
    let l2 = ll(lt);
    let l3 = l2.ln();
    Ok((lt / (2.0 * l2) + lt * l3 / (l2 * l2)).ceil() as u32)
}

/// The paper's admissible range [(log log T)², log T / log log T].
pub fn paper_v_range(t_scale: f64) -> (f64, f64) {
    let lt = t_scale.ln();
    let l2 = ll(lt);
    (l2 * l2, lt / l2)
}

impl TypicalityParams {
    pub fn new(t_scale: f64, v: f64, delta: f64, policy: RangePolicy) -> Result<Self> {
        if !(t_scale >= 16.0 && t_scale.is_finite()) {
            return Err(invalid("T", format!("{t_scale} must be at least 16")));
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(invalid("delta", format!("{delta} must lie in (0, 1]")));
        }
        let (lo, hi) = paper_v_range(t_scale);
        match policy {
            RangePolicy::Strict => {
                if !(v >= lo && v <= hi) {
                    return Err(Error::OutOfRange { value: v, lo, hi });
                }
            }
            RangePolicy::Desk => {
                let top = hi.max(all_typical_cap(t_scale)? as f64);
                if !(v > 1.0 && v <= top) {
                    return Err(Error::OutOfRange { value: v, lo: 1.0, hi: top });
                }
            }
        }
        Ok(Self {
            t_scale,
            v,
            delta,
            policy,
        })
    }

    pub fn t_scale(&self) -> f64 {
        self.t_scale
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn policy(&self) -> RangePolicy {
        self.policy
    }

    /// x = T^{1/V}.
    pub fn x(&self) -> f64 {
        self.t_scale.powf(1.0 / self.v)
    }

    pub fn in_paper_range(&self) -> bool {
        let (lo, hi) = paper_v_range(self.t_scale);
        self.v >= lo && self.v <= hi
    }

    /// Window length of criterion (ii), before clamping.
    pub fn window_ii(&self) -> f64 {
        2.0 * self.delta * PI * self.v / self.t_scale.ln()
    }

    /// Window length of criterion (iii), before clamping.
    pub fn window_iii(&self) -> f64 {
        2.0 * PI * self.v / (self.v.ln() * self.t_scale.ln())
    }
}

/// Σ_{n≤x} Λ(n) n^{−σ−it} / log n · log(x/n) / log x. Zero when x < 2.
pub fn lambda_weighted_sum(sigma: f64, t: f64, x: f64, mangoldt: &MangoldtTable) -> Result<Complex64> {
    if !(sigma >= 0.5) {
        return Err(invalid("sigma", format!("{sigma} must be at least 1/2")));
    }
    if !(x >= 1.0 && x.is_finite()) {
        return Err(invalid("x", format!("{x} must be at least 1")));
    }
    let terms = WeightedTerms::new(t, x, mangoldt)?;
    Ok(terms.at(sigma))
}

/// The n-dependent part of the criterion (i) sum at fixed t and x.
struct WeightedTerms {
    /// (log n, w_n e^{−it log n}) with w_n = Λ(n)/log n · log(x/n)/log x.
    terms: Vec<(f64, Complex64)>,
    /// Σ Λ(n) n^{−½} log(x/n) / log x, a Lipschitz constant in σ and t.
    lipschitz: f64,
    /// Termwise majorant at σ = 2.
    abs_at_two: f64,
}

impl WeightedTerms {
    fn new(t: f64, x: f64, mangoldt: &MangoldtTable) -> Result<Self> {
        let mut terms = Vec::new();
        let mut lipschitz = 0.0;
        let mut abs_at_two = 0.0;
        if x >= 2.0 {
            let limit = x.floor() as u64;
            let lx = x.ln();
            for (n, lp) in mangoldt.prime_powers_upto(limit)? {
                let ln = (n as f64).ln();
                let w = lp / ln * (lx - ln) / lx;
                let phase = Complex64::from_polar(1.0, -t * ln);
                terms.push((ln, phase * w));
                lipschitz += lp * (-0.5 * ln).exp() * (lx - ln) / lx;
                abs_at_two += w * (-2.0 * ln).exp();
            }
        }
        Ok(Self {
            terms,
            lipschitz,
            abs_at_two,
        })
    }

    fn at(&self, sigma: f64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for &(ln, c) in &self.terms {
            s += c * (-sigma * ln).exp();
        }
        s
    }
}

/// Where a criterion fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Witness {
    Sigma { sigma: f64, modulus: f64 },
    Window { lo: f64, hi: f64, count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypicalityVerdict {
    pub t: f64,
    pub typical: bool,
    pub failed_criterion: Option<Criterion>,
    pub witness: Option<Witness>,
    /// (2V − max|sum| − slack, (1+δ)V − max count, V − max count).
    pub margins: [f64; 3],
}

/// Largest number of sorted ordinates in a closed window [a, a+len] with
/// lo ≤ a and a + len ≤ hi, together with the leftmost maximizing anchor
/// among the ordinates (each pulled back to end flush with hi). The window
/// is clamped to [lo, hi] when it is longer.
pub fn max_window_count(ordinates: &[f64], lo: f64, hi: f64, len: f64) -> (usize, f64) {
    let len = len.min(hi - lo);
    let start = ordinates.partition_point(|&g| g < lo);
    let end = ordinates.partition_point(|&g| g <= hi);
    let pts = &ordinates[start..end];
    let last_anchor = hi - len;
    let mut best = (0usize, lo);
    let (mut first, mut j) = (0usize, 0usize);
    for &g in pts {
        let a = g.min(last_anchor);
        while pts[first] < a {
            first += 1;
        }
        while j < pts.len() && pts[j] <= a + len {
            j += 1;
        }
        if j - first > best.0 {
            best = (j - first, a);
        }
        if a == last_anchor {
            break;
        }
    }
    best
}

/// Criterion (i): (margin, maximizing σ, its modulus).
fn criterion_i(v: f64, terms: &WeightedTerms, sigma_grid: usize, t_step: f64) -> (f64, f64, f64) {
    let sigma_step = 1.5 / sigma_grid as f64;
    let mut best = (0.5, 0.0f64);
    for j in 0..=sigma_grid {
        let sigma = 0.5 + j as f64 * sigma_step;
        let m = terms.at(sigma).norm();
        if m > best.1 {
            best = (sigma, m);
        }
    }
    let slack = terms.lipschitz * 0.5 * (sigma_step + t_step);
    (2.0 * v - best.1.max(terms.abs_at_two) - slack, best.0, best.1)
}

/// Criteria (ii) and (iii) over windows inside [lo, hi].
fn window_criteria(params: &TypicalityParams, table: &ZeroTable, lo: f64, hi: f64) -> [(f64, Witness); 2] {
    let v = params.v;
    let mut out = [(0.0, Witness::Window { lo, hi, count: 0 }); 2];
    for (slot, (len, limit)) in [
        (params.window_ii(), (1.0 + params.delta) * v),
        (params.window_iii(), v),
    ]
    .into_iter()
    .enumerate()
    {
        let (count, a) = max_window_count(table.ordinates(), lo, hi, len);
        let len = len.min(hi - lo);
        out[slot] = (limit - count as f64, Witness::Window { lo: a, hi: a + len, count });
    }
    out
}

fn verdict(t: f64, i: (f64, f64, f64), windows: [(f64, Witness); 2]) -> TypicalityVerdict {
    let margins = [i.0, windows[0].0, windows[1].0];
    let (failed, witness) = if margins[0] < 0.0 {
        (Some(Criterion::I), Some(Witness::Sigma { sigma: i.1, modulus: i.2 }))
    } else if margins[1] < 0.0 {
        (Some(Criterion::II), Some(windows[0].1))
    } else if margins[2] < 0.0 {
        (Some(Criterion::III), Some(windows[1].1))
    } else {
        (None, None)
    };
    TypicalityVerdict {
        t,
        typical: failed.is_none(),
        failed_criterion: failed,
        witness,
        margins,
    }
}

fn check_scale(t: f64, params: &TypicalityParams) -> Result<()> {
    let big_t = params.t_scale;
    if !(t >= big_t && t <= 2.0 * big_t) {
        return Err(Error::OutOfRange {
            value: t,
            lo: big_t,
            hi: 2.0 * big_t,
        });
    }
    Ok(())
}

/// Classify one ordinate.
pub fn check_typical(
    t: f64,
    params: &TypicalityParams,
    table: &ZeroTable,
    mangoldt: &MangoldtTable,
    sigma_grid: usize,
) -> Result<TypicalityVerdict> {
    check_scale(t, params)?;
    if sigma_grid == 0 {
        return Err(invalid("sigma_grid", "must be positive"));
    }
    table.require(t - 1.0, t + 1.0)?;
    let terms = WeightedTerms::new(t, params.x(), mangoldt)?;
    let i = criterion_i(params.v, &terms, sigma_grid, 0.0);
    Ok(verdict(t, i, window_criteria(params, table, t - 1.0, t + 1.0)))
}

/// Grid sizes used when every point of [n, n+1] must be typical.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitGrid {
    pub t_points: usize,
    pub sigma_grid: usize,
}

impl Default for UnitGrid {
    fn default() -> Self {
        Self {
            t_points: 64,
            sigma_grid: 64,
        }
    }
}

/// Whether every point of [n, n+1] is typical. Criterion (i) runs on the
/// t grid with slack; criteria (ii) and (iii) are exact because the union
/// of admissible windows is every subwindow of [n−1, n+2]. The verdict's
/// `t` is the grid point with the smallest criterion (i) margin.
pub fn unit_interval_typical(
    n: f64,
    params: &TypicalityParams,
    table: &ZeroTable,
    mangoldt: &MangoldtTable,
    grid: &UnitGrid,
) -> Result<TypicalityVerdict> {
    check_scale(n, params)?;
    check_scale(n + 1.0, params)?;
    if grid.t_points < 2 || grid.sigma_grid == 0 {
        return Err(invalid("grid", "need at least two t points and one sigma step"));
    }
    table.require(n - 1.0, n + 2.0)?;
    let windows = window_criteria(params, table, n - 1.0, n + 2.0);
    let step = 1.0 / (grid.t_points - 1) as f64;
    let mut worst = (n, (f64::INFINITY, 0.5, 0.0));
    for j in 0..grid.t_points {
        let t = n + j as f64 * step;
        let terms = WeightedTerms::new(t, params.x(), mangoldt)?;
        let i = criterion_i(params.v, &terms, grid.sigma_grid, step);
        if i.0 < worst.1 .0 {
            worst = (t, i);
        }
    }
    Ok(verdict(worst.0, worst.1, windows))
}

/// Outcome of the smallest-V search over one unit interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallestV {
    pub n: u64,
    pub v: u32,
    pub cap: u32,
    /// False when no V up to the cap passed and the cap was returned on the
    /// strength of the all-typical threshold alone.
    pub verified: bool,
}

/// The lowest V tried by [`smallest_typical_v`].
pub const V_SEARCH_FLOOR: u32 = 2;

/// Smallest integer V ≥ 2 such that every point of [n, n+1] is V-typical
/// of size T, or the all-typical cap when nothing up to it passes; the cap
/// is then returned with `verified` false.
pub fn smallest_typical_v(
    n: u64,
    t_scale: f64,
    delta: f64,
    table: &ZeroTable,
    mangoldt: &MangoldtTable,
    grid: &UnitGrid,
) -> Result<SmallestV> {
    let nf = n as f64;
    if !(nf >= t_scale && nf < 2.0 * t_scale) {
        return Err(Error::OutOfRange {
            value: nf,
            lo: t_scale,
            hi: 2.0 * t_scale,
        });
    }
    let cap = all_typical_cap(t_scale)?;
    for v in V_SEARCH_FLOOR..=cap {
        let params = TypicalityParams::new(t_scale, v as f64, delta, RangePolicy::Desk)?;
        if unit_interval_typical(nf, &params, table, mangoldt, grid)?.typical {
            return Ok(SmallestV {
                n,
                v,
                cap,
                verified: true,
            });
        }
    }
    Ok(SmallestV {
        n,
        v: cap,
        cap,
        verified: false,
    })
}

/// log of T·exp(−V log(V/log log T) + 2V log log V + C·V), taking log T.
pub fn census_log_bound(log_t: f64, v: f64, c: f64) -> f64 {
    let l2 = ll(log_t);
    log_t - v * (v / l2).ln() + 2.0 * v * v.ln().ln() + c * v
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusReport {
    #[serde(rename = "T")]
    pub t_scale: f64,
    #[serde(rename = "V")]
    pub v: f64,
    pub delta: f64,
    pub spacing: f64,
    pub step: f64,
    pub points_tested: usize,
    pub atypical_count: usize,
    /// Atypical grid points before spacing selection.
    pub atypical_points: usize,
    pub log_bound: f64,
    pub bound_value: f64,
    pub bound_constant: f64,
    pub ratio: f64,
    pub eta: f64,
    pub k: u64,
    pub in_paper_range: bool,
    pub selected: Vec<TypicalityVerdict>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CensusConfig {
    pub spacing: f64,
    pub step: f64,
    pub sigma_grid: usize,
    pub bound_constant: f64,
}

impl Default for CensusConfig {
    fn default() -> Self {
        Self {
            spacing: 1.0,
            step: 0.25,
            sigma_grid: 64,
            bound_constant: 0.0,
        }
    }
}

/// η = 1/log V and k = ⌊V/(1+η)⌋.
pub fn eta_k(v: f64) -> (f64, u64) {
    let eta = 1.0 / v.ln();
    (eta, (v / (1.0 + eta)).floor() as u64)
}

/// Greedy left-to-right selection of spacing-separated atypical points on
/// a grid of [T, 2T].
pub fn atypical_census(
    params: &TypicalityParams,
    table: &ZeroTable,
    mangoldt: &MangoldtTable,
    cfg: &CensusConfig,
) -> Result<CensusReport> {
    if !(cfg.spacing >= 1.0) {
        return Err(invalid("spacing", format!("{} must be at least 1", cfg.spacing)));
    }
    if !(cfg.step > 0.0) {
        return Err(invalid("step", "must be positive"));
    }
    let big_t = params.t_scale;
    table.require(big_t - 1.0, 2.0 * big_t + 1.0)?;
    let count = (big_t / cfg.step).floor() as usize + 1;
    let verdicts: Vec<TypicalityVerdict> = (0..count)
        .into_par_iter()
        .map(|j| {
            let t = (big_t + j as f64 * cfg.step).min(2.0 * big_t);
            check_typical(t, params, table, mangoldt, cfg.sigma_grid)
        })
        .collect::<Result<_>>()?;
    let mut selected: Vec<TypicalityVerdict> = Vec::new();
    let mut atypical_points = 0;
    for v in &verdicts {
        if v.typical {
            continue;
        }
        atypical_points += 1;
        if selected.last().map_or(true, |last| v.t - last.t >= cfg.spacing) {
            selected.push(*v);
        }
    }
    let log_bound = census_log_bound(big_t.ln(), params.v, cfg.bound_constant);
    let bound_value = log_bound.exp();
    let (eta, k) = eta_k(params.v);
    Ok(CensusReport {
        t_scale: big_t,
        v: params.v,
        delta: params.delta,
        spacing: cfg.spacing,
        step: cfg.step,
        points_tested: verdicts.len(),
        atypical_count: selected.len(),
        atypical_points,
        log_bound,
        bound_value,
        bound_constant: cfg.bound_constant,
        ratio: selected.len() as f64 / bound_value,
        eta,
        k,
        in_paper_range: params.in_paper_range(),
        selected,
    })
}

/// Outcome of the large-sieve moment comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentReport {
    pub points: usize,
    pub k: u32,
    #[serde(rename = "T")]
    pub t_span: f64,
    pub alpha: f64,
    pub moment_sum: f64,
    /// Σ |a(p)|² p^{−2α}.
    pub coefficient_sum: f64,
    /// T (log T)² k! (Σ |a(p)|² p^{−2α})^k.
    pub majorant: f64,
    pub ratio: f64,
}

/// Σ_r |P(s_r)|^{2k} against T (log T)² k! (Σ|a(p)|² p^{−2α})^k for
/// P(s) = Σ a(p) p^{−s}.
pub fn dirichlet_moment_check(
    coeffs: &[(u64, Complex64)],
    points: &[Complex64],
    k: u32,
    t_span: f64,
    alpha: f64,
) -> Result<MomentReport> {
    if coeffs.is_empty() || points.is_empty() {
        return Err(invalid("coeffs", "need at least one coefficient and one point"));
    }
    if k == 0 {
        return Err(invalid("k", "must be positive"));
    }
    if !(t_span >= 3.0) {
        return Err(invalid("T", format!("{t_span} must be at least 3")));
    }
    if let Some((p, a)) = coeffs.iter().find(|(_, a)| a.norm() > 4.0) {
        return Err(invalid("coeffs", format!("|a({p})| = {} exceeds 4", a.norm())));
    }
    let n_max = coeffs.iter().map(|c| c.0).max().unwrap_or(1) as f64;
    if n_max.powi(k as i32) > t_span {
        return Err(invalid("k", format!("{n_max}^{k} exceeds T = {t_span}")));
    }
    if let Some(s) = points.iter().find(|s| s.re < alpha) {
        return Err(invalid("points", format!("Re {} below alpha = {alpha}", s)));
    }
    let mut ims: Vec<f64> = points.iter().map(|s| s.im).collect();
    ims.sort_by(f64::total_cmp);
    for w in ims.windows(2) {
        if w[1] - w[0] < 1.0 {
            return Err(invalid("points", format!("ordinates {} and {} closer than 1", w[0], w[1])));
        }
    }
    if ims.len() > 1 && ims[ims.len() - 1] - ims[0] > t_span {
        return Err(invalid("points", format!("ordinate spread exceeds T = {t_span}")));
    }
    let mut moment_sum = 0.0;
    for &s in points {
        let mut p_val = Complex64::new(0.0, 0.0);
        for &(p, a) in coeffs {
            p_val += a * (-s * (p as f64).ln()).exp();
        }
        moment_sum += p_val.norm_sqr().powi(k as i32);
    }
    let coefficient_sum: f64 = coeffs
        .iter()
        .map(|&(p, a)| a.norm_sqr() * (p as f64).powf(-2.0 * alpha))
        .sum();
    let k_fact: f64 = (1..=k).map(|j| j as f64).product();
    let majorant = t_span * t_span.ln().powi(2) * k_fact * coefficient_sum.powi(k as i32);
    Ok(MomentReport {
        points: points.len(),
        k,
        t_span,
        alpha,
        moment_sum,
        coefficient_sum,
        majorant,
        ratio: moment_sum / majorant,
    })
}

/// Both sides of k(log(k log log T) − 2 log(ηV)) ≤ −V log(V/log log T) +
/// 2V log log V + V with η = 1/log V and k = ⌊V/(1+η)⌋, taking log T.
pub fn auxiliary_inequality(log_t: f64, v: f64) -> (f64, f64) {
    let l2 = ll(log_t);
    let (eta, k) = eta_k(v);
    let kf = k as f64;
    let lhs = if k == 0 {
        0.0
    } else {
        kf * ((kf * l2).ln() - 2.0 * (eta * v).ln())
    };
    let rhs = -v * (v / l2).ln() + 2.0 * v * v.ln().ln() + v;
    (lhs, rhs)
}

/// (log T, V) pairs with V on [(log log T)², log T / log log T], 41
/// values of log T from 100 to 10⁶ and 100 values of V each.
pub fn auxiliary_grid() -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 0..=40 {
        let log_t = 100.0 * 1e4f64.powf(i as f64 / 40.0);
        let l2 = log_t.ln();
        let (lo, hi) = (l2 * l2, log_t / l2);
        for j in 0..=99 {
            out.push((log_t, lo + (hi - lo) * j as f64 / 99.0));
        }
    }
    out
}

/// Both sides of Σ_{n=0}^{N} a/(a² + (cn)²) ≤ 1/a + π/(2c).
pub fn lorentz_sum_bound(a: f64, c: f64, n: u64) -> (f64, f64) {
    let mut s = 0.0;
    for j in 0..=n {
        let cn = c * j as f64;
        s += a / (a * a + cn * cn);
    }
    (s, 1.0 / a + PI / (2.0 * c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_at_one_thousand() {
        assert_eq!(all_typical_cap(1e3).unwrap(), 4);
    }

    #[test]
    fn strict_range_is_empty_at_desk_scale() {
        let (lo, hi) = paper_v_range(1e3);
        assert!(lo > hi);
        assert!(TypicalityParams::new(1e3, 3.6, 0.5, RangePolicy::Strict).is_err());
        assert!(TypicalityParams::new(1e3, 4.0, 0.5, RangePolicy::Desk).is_ok());
    }

    #[test]
    fn clamped_window_counts_everything() {
        let ords = [1.0, 1.5, 2.0, 2.9];
        assert_eq!(max_window_count(&ords, 1.0, 3.0, 5.0).0, 4);
        assert_eq!(max_window_count(&ords, 1.0, 3.0, 0.5).0, 2);
        assert_eq!(max_window_count(&ords, 1.2, 3.0, 0.4).0, 1);
    }
}
