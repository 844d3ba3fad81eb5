//! Perron integrals for M(N) = Σ_{n≤N} μ(n), on the vertical line
//! Re z = 1 + 1/log N and along a dyadic contour whose abscissas follow the
//! smallest typical V on each unit interval.
//!
//! Both integrands are conjugate-symmetric, so the integral over the full
//! symmetric path equals 2i Im of the upper half and A_N = Im(I_upper)/π.

use crate::arith::{mertens, MangoldtTable, MertensSeries};
use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate, QuadConfig};
use crate::typicality::{smallest_typical_v, UnitGrid};
use crate::zeros::ZeroTable;
use crate::zeta::{zeta, ComplexPoint, EvalPrecision};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SegmentKind {
    Vertical,
    Horizontal,
}

/// A directed segment in the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub start: ComplexPoint,
    pub end: ComplexPoint,
}

impl Segment {
    fn vertical(sigma: f64, t0: f64, t1: f64) -> Self {
        Self {
            kind: SegmentKind::Vertical,
            start: ComplexPoint::new(sigma, t0),
            end: ComplexPoint::new(sigma, t1),
        }
    }

    fn horizontal(s0: f64, s1: f64, t: f64) -> Self {
        Self {
            kind: SegmentKind::Horizontal,
            start: ComplexPoint::new(s0, t),
            end: ComplexPoint::new(s1, t),
        }
    }

    pub fn length(&self) -> f64 {
        (self.end.to_complex() - self.start.to_complex()).norm()
    }
}

/// Options for [`build_contour`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourOptions {
    /// The exponent c in κ = ⌊(log N)^{1/2} (log log N)^c⌋.
    pub c_exponent: f64,
    pub delta: f64,
    /// Replace the computed κ.
    pub kappa_override: Option<u32>,
    /// Lower K to what the zero table covers instead of failing.
    pub cap_k_to_coverage: bool,
    pub grid: UnitGrid,
}

impl Default for ContourOptions {
    fn default() -> Self {
        Self {
            c_exponent: 2.5,
            delta: 0.5,
            kappa_override: None,
            cap_k_to_coverage: true,
            grid: UnitGrid::default(),
        }
    }
}

/// The dyadic contour in the upper half-plane; the path is completed by
/// its mirror image.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourSpec {
    #[serde(rename = "N")]
    pub n: u64,
    pub c_exponent: f64,
    pub delta: f64,
    /// κ actually used.
    pub kappa: u32,
    /// ⌊(log N)^{1/2} (log log N)^c⌋ before clamping.
    pub kappa_formula: u32,
    /// K actually used.
    #[serde(rename = "K")]
    pub k_top: u32,
    /// ⌊log N / log 2⌋.
    pub k_formula: u32,
    /// 2^k for κ ≤ k ≤ K.
    pub t_k: Vec<f64>,
    pub segments: Vec<Segment>,
    /// V_n for every unit interval [n, n+1] crossed by the micro-segments.
    pub offsets: BTreeMap<u64, u32>,
    /// Unit intervals whose V_n fell back to the cap without passing.
    pub unverified: Vec<u64>,
    pub mirror: bool,
}

/// ⌊(log N)^{1/2} (log log N)^c⌋.
pub fn kappa_formula(n: u64, c: f64) -> u32 {
    let l = (n as f64).ln();
    (l.sqrt() * l.ln().powf(c)).floor() as u32
}

/// ⌊log N / log 2⌋, computed exactly.
pub fn k_formula(n: u64) -> u32 {
    63 - n.leading_zeros()
}

/// The largest k with 2^k + 1 inside the table.
pub fn coverage_k(table: &ZeroTable) -> Result<u32> {
    let (_, hi) = table.span().ok_or(Error::EmptyTable)?;
    if hi < 3.0 {
        return Err(Error::EmptyTable);
    }
    Ok((hi - 1.0).log2().floor() as u32)
}

fn cap_bound(n: u64) -> f64 {
    let l = (n as f64).ln();
    let l2 = l.ln();
    0.5 * l / l2 + l * l2.ln() / (l2 * l2) + 1.0
}

impl ContourSpec {
    pub fn base_sigma(&self) -> f64 {
        0.5 + 1.0 / (self.n as f64).ln()
    }

    pub fn line_sigma(&self) -> f64 {
        1.0 + 1.0 / (self.n as f64).ln()
    }

    pub fn abscissa(&self, v: u32) -> f64 {
        0.5 + v as f64 / (self.n as f64).ln()
    }

    /// The ordinate where the upper path meets the vertical line.
    pub fn top(&self) -> f64 {
        self.segments.last().map_or(0.0, |s| s.end.t)
    }

    /// A contour through prescribed offsets: vertical from the base point to
    /// the first key, micro-segments over [n, n+1] for consecutive keys, and
    /// a closing horizontal at the last key + 1.
    pub fn from_offsets(n: u64, c_exponent: f64, delta: f64, offsets: BTreeMap<u64, u32>) -> Result<Self> {
        if n < 3 {
            return Err(invalid("N", format!("{n} below 3")));
        }
        let keys: Vec<u64> = offsets.keys().copied().collect();
        if keys.windows(2).any(|w| w[1] != w[0] + 1) {
            return Err(invalid("offsets", "keys must be consecutive integers"));
        }
        let mut spec = Self {
            n,
            c_exponent,
            delta,
            kappa: 0,
            kappa_formula: kappa_formula(n, c_exponent),
            k_top: 0,
            k_formula: k_formula(n),
            t_k: Vec::new(),
            segments: Vec::new(),
            offsets,
            unverified: Vec::new(),
            mirror: true,
        };
        spec.segments = spec.layout(keys.first().map(|&k| k as f64));
        spec.validate()?;
        Ok(spec)
    }

    fn layout(&self, first: Option<f64>) -> Vec<Segment> {
        let base = self.base_sigma();
        let right = self.line_sigma();
        let mut segs = Vec::new();
        match first {
            None => {
                let top = *self.t_k.last().unwrap_or(&1.0);
                segs.push(Segment::vertical(base, 0.0, top));
                segs.push(Segment::horizontal(base, right, top));
            }
            Some(t0) => {
                segs.push(Segment::vertical(base, 0.0, t0));
                let mut sigma = base;
                let mut run_start = t0;
                let mut prev_v: Option<u32> = None;
                for (&n, &v) in &self.offsets {
                    let s = self.abscissa(v);
                    if prev_v != Some(v) {
                        if let Some(pv) = prev_v {
                            segs.push(Segment::vertical(self.abscissa(pv), run_start, n as f64));
                        }
                        segs.push(Segment::horizontal(sigma, s, n as f64));
                        run_start = n as f64;
                        sigma = s;
                        prev_v = Some(v);
                    }
                }
                let last = *self.offsets.keys().last().expect("non-empty") as f64 + 1.0;
                segs.push(Segment::vertical(sigma, run_start, last));
                segs.push(Segment::horizontal(sigma, right, last));
            }
        }
        segs.retain(|s| s.length() > 0.0);
        segs
    }

    /// Connectivity, endpoint placement and the V_n cap.
    pub fn validate(&self) -> Result<()> {
        let first = self.segments.first().ok_or_else(|| Error::Diagnostic("empty contour".into()))?;
        if first.start != ComplexPoint::new(self.base_sigma(), 0.0) {
            return Err(Error::Diagnostic(format!("contour starts at {:?}", first.start)));
        }
        for w in self.segments.windows(2) {
            if w[0].end != w[1].start {
                return Err(Error::Diagnostic(format!("gap between {:?} and {:?}", w[0].end, w[1].start)));
            }
        }
        let last = self.segments.last().expect("non-empty");
        if last.end.sigma != self.line_sigma() {
            return Err(Error::Diagnostic(format!("contour ends at {:?}", last.end)));
        }
        for (&n, &v) in &self.offsets {
            if n >= 16 && v as f64 > cap_bound(n) {
                return Err(Error::Hypothesis(format!("V_{n} = {v} above its cap {}", cap_bound(n))));
            }
        }
        Ok(())
    }

    /// The segments of the full path, lower mirror included, in order.
    pub fn full_path(&self) -> Vec<Segment> {
        let mut path: Vec<Segment> = self
            .segments
            .iter()
            .rev()
            .map(|s| Segment {
                kind: s.kind,
                start: s.end.conj(),
                end: s.start.conj(),
            })
            .collect();
        path.extend(self.segments.iter().copied());
        path
    }
}

/// Build the contour for N, computing V_n on every unit interval.
pub fn build_contour(
    n: u64,
    opts: &ContourOptions,
    table: &ZeroTable,
    mangoldt: &MangoldtTable,
) -> Result<ContourSpec> {
    if n < 16 {
        return Err(invalid("N", format!("{n} below 16")));
    }
    let kf = kappa_formula(n, opts.c_exponent);
    let kfull = k_formula(n);
    let cover = coverage_k(table)?;
    let k_top = if kfull > cover {
        if !opts.cap_k_to_coverage {
            return Err(Error::Coverage {
                need_lo: 0.0,
                need_hi: (1u64 << kfull) as f64 + 1.0,
                have_lo: 0.0,
                have_hi: table.span().map_or(0.0, |s| s.1),
            }
            .with_note(format!("achievable K = {cover}")));
        }
        cover
    } else {
        kfull
    };
    let kappa = opts.kappa_override.unwrap_or(kf).min(k_top);
    if kappa < k_top && kappa < 4 {
        return Err(invalid("kappa", format!("{kappa} below 4; typicality needs T >= 16")));
    }
    let t_k: Vec<f64> = (kappa..=k_top).map(|k| (1u64 << k) as f64).collect();
    let mut offsets = BTreeMap::new();
    let mut unverified = Vec::new();
    if kappa < k_top {
        let jobs: Vec<(u64, f64)> = (kappa..k_top)
            .flat_map(|k| {
                let tk = 1u64 << k;
                (tk..2 * tk).map(move |m| (m, tk as f64))
            })
            .collect();
        let found: Vec<_> = jobs
            .par_iter()
            .map(|&(m, tk)| smallest_typical_v(m, tk, opts.delta, table, mangoldt, &opts.grid))
            .collect::<Result<_>>()?;
        for s in found {
            offsets.insert(s.n, s.v);
            if !s.verified {
                unverified.push(s.n);
            }
        }
    }
    let mut spec = ContourSpec {
        n,
        c_exponent: opts.c_exponent,
        delta: opts.delta,
        kappa,
        kappa_formula: kf,
        k_top,
        k_formula: kfull,
        t_k,
        segments: Vec::new(),
        offsets,
        unverified,
        mirror: true,
    };
    let first = spec.offsets.keys().next().map(|&k| k as f64);
    spec.segments = spec.layout(first);
    spec.validate()?;
    Ok(spec)
}

trait WithNote {
    fn with_note(self, note: String) -> Error;
}

impl WithNote for Error {
    fn with_note(self, note: String) -> Error {
        Error::Diagnostic(format!("{self}; {note}"))
    }
}

/// Outcome of a Perron integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerronResult {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "T")]
    pub t: f64,
    /// A_N; the imaginary part is zero when symmetry is exploited.
    pub integral: Complex64,
    /// N log T / T.
    pub error_budget: f64,
    pub mertens_exact: i64,
    pub quadrature_error: f64,
    pub evaluations: usize,
}

impl PerronResult {
    /// |A_N − M(N)| / (N log T / T).
    pub fn ratio(&self) -> f64 {
        (self.integral.re - self.mertens_exact as f64).abs() / self.error_budget
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerronOptions {
    pub quad: QuadConfig,
    /// Integrate only the upper half and take Im/π.
    pub use_symmetry: bool,
    pub prec: EvalPrecision,
    /// Initial panels per 2π/log N of segment length.
    pub panel_density: f64,
}

impl Default for PerronOptions {
    fn default() -> Self {
        Self {
            quad: QuadConfig {
                abs_tol: 1e-8,
                rel_tol: 0.0,
                max_intervals: 400_000,
            },
            use_symmetry: true,
            prec: EvalPrecision::default(),
            panel_density: 1.0,
        }
    }
}

/// ζ(z)^{−1} N^z / z, NaN when ζ cannot be evaluated.
fn integrand(z: Complex64, log_n: f64, prec: &EvalPrecision) -> Complex64 {
    match zeta(ComplexPoint::from(z), prec) {
        Ok(v) => (z * log_n).exp() / (v.value * z),
        Err(_) => Complex64::new(f64::NAN, f64::NAN),
    }
}

/// ∫ over one directed segment, with the number of initial panels chosen
/// from its length and the oscillation rate log N.
fn segment_integral(seg: &Segment, log_n: f64, opts: &PerronOptions) -> Result<(Complex64, f64, usize)> {
    let a = seg.start.to_complex();
    let b = seg.end.to_complex();
    let d = b - a;
    let len = d.norm();
    let panels = ((opts.panel_density * len * log_n / (2.0 * PI)).ceil() as usize).clamp(1, 200_000);
    let r = integrate(|s: f64| integrand(a + d * s, log_n, &opts.prec) * d, 0.0, 1.0, panels, &opts.quad)?;
    Ok((r.value, r.error, r.evaluations))
}

/// (1/2πi) ∫_{c−iT}^{c+iT} ζ(z)^{−1} N^z/z dz with c = 1 + 1/log N.
pub fn perron_line_integral(n: u64, t: f64, mertens_series: &MertensSeries, opts: &PerronOptions) -> Result<PerronResult> {
    if !(t >= 3.0 && t <= n as f64) {
        return Err(invalid("T", format!("{t} outside [3, N = {n}]")));
    }
    let log_n = (n as f64).ln();
    let c = 1.0 + 1.0 / log_n;
    let m = mertens(mertens_series, n)?;
    let (integral, err, evals) = if opts.use_symmetry {
        let (i, e, ev) = segment_integral(&Segment::vertical(c, 0.0, t), log_n, opts)?;
        (Complex64::new(i.im / PI, 0.0), e / PI, ev)
    } else {
        let (i, e, ev) = segment_integral(&Segment::vertical(c, -t, t), log_n, opts)?;
        (i / Complex64::new(0.0, 2.0 * PI), e / (2.0 * PI), ev)
    };
    Ok(PerronResult {
        n,
        t,
        integral,
        error_budget: n as f64 * t.ln() / t,
        mertens_exact: m,
        quadrature_error: err,
        evaluations: evals,
    })
}

/// Distance below which a segment counts as passing through a tabulated
/// zero on the critical line.
pub const ZERO_GUARD: f64 = 1e-6;

fn check_zero_clearance(seg: &Segment, table: &ZeroTable) -> Result<()> {
    let (s0, s1) = (seg.start.sigma.min(seg.end.sigma), seg.start.sigma.max(seg.end.sigma));
    if s0 - 0.5 > ZERO_GUARD {
        return Ok(());
    }
    let (t0, t1) = (seg.start.t.min(seg.end.t), seg.start.t.max(seg.end.t));
    for &g in table.between(t0 - ZERO_GUARD, t1 + ZERO_GUARD) {
        let close = match seg.kind {
            SegmentKind::Vertical => true,
            SegmentKind::Horizontal => (g - seg.start.t).abs() <= ZERO_GUARD && s0 <= 0.5 + ZERO_GUARD && s1 >= 0.5,
        };
        if close {
            return Err(Error::Diagnostic(format!("segment {seg:?} passes within {ZERO_GUARD} of the zero at {g}")));
        }
    }
    Ok(())
}

/// Per-segment contributions to a contour integral.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourIntegral {
    pub result: PerronResult,
    pub segment_values: Vec<Complex64>,
    pub segment_errors: Vec<f64>,
}

/// (1/2πi) ∫ over the contour and its mirror.
pub fn contour_integral(
    contour: &ContourSpec,
    table: &ZeroTable,
    mertens_series: &MertensSeries,
    opts: &PerronOptions,
) -> Result<ContourIntegral> {
    let log_n = (contour.n as f64).ln();
    for seg in &contour.segments {
        check_zero_clearance(seg, table)?;
    }
    let parts: Vec<(Complex64, f64, usize)> = contour
        .segments
        .par_iter()
        .map(|s| segment_integral(s, log_n, opts))
        .collect::<Result<_>>()?;
    let mut upper = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut evals = 0;
    for &(v, e, ev) in &parts {
        upper += v;
        err += e;
        evals += ev;
    }
    let t = contour.top();
    Ok(ContourIntegral {
        result: PerronResult {
            n: contour.n,
            t,
            integral: Complex64::new(upper.im / PI, 0.0),
            error_budget: contour.n as f64 * t.ln() / t,
            mertens_exact: mertens(mertens_series, contour.n)?,
            quadrature_error: err / PI,
            evaluations: evals,
        },
        segment_values: parts.iter().map(|p| p.0).collect(),
        segment_errors: parts.iter().map(|p| p.1).collect(),
    })
}

/// log of one B_N term: V log(log N / log n) + 2(1+2δ) V log log V − log n.
fn b_term_log(log_n_big: f64, n: u64, v: u32, delta: f64) -> f64 {
    let lnn = (n as f64).ln();
    let v = v as f64;
    v * (log_n_big / lnn).ln() + 2.0 * (1.0 + 2.0 * delta) * v * v.ln().ln() - lnn
}

/// B_N with its comparison envelope exp((log N)^{1/2} (log log N)^{5−c+6δ}).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BnReport {
    pub value: f64,
    pub log_value: f64,
    pub log_envelope: f64,
    pub ratio: f64,
    pub terms: usize,
}

pub fn b_n_sum(contour: &ContourSpec, delta: f64) -> Result<BnReport> {
    if contour.offsets.is_empty() {
        return Err(invalid("contour", "no offsets; B_N needs V_n on every unit interval"));
    }
    if contour.offsets.keys().any(|&n| n < 2) {
        return Err(invalid("contour", "offsets need n >= 2"));
    }
    let log_n_big = (contour.n as f64).ln();
    let logs: Vec<f64> = contour
        .offsets
        .iter()
        .map(|(&n, &v)| b_term_log(log_n_big, n, v, delta))
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_value = top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln();
    let log_envelope = log_n_big.sqrt() * log_n_big.ln().powf(5.0 - contour.c_exponent + 6.0 * delta);
    Ok(BnReport {
        value: log_value.exp(),
        log_value,
        log_envelope,
        ratio: (log_value - log_envelope).exp(),
        terms: logs.len(),
    })
}

/// f(V) = AV − V log V + C V log log V.
pub fn calculus_lemma_f(a: f64, c: f64, v: f64) -> f64 {
    a * v - v * v.ln() + c * v * v.ln().ln()
}

/// f′(V) = A − log V + C log log V − 1 + C / log V.
pub fn calculus_lemma_derivative(a: f64, c: f64, v: f64) -> f64 {
    a - v.ln() + c * v.ln().ln() - 1.0 + c / v.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaReport {
    pub a: f64,
    pub c: f64,
    pub points: usize,
    pub violations: usize,
    /// min over the grid of (A + C log A) − log f(V), +∞ when f ≤ 0 everywhere.
    pub min_log_slack: f64,
    pub worst_v: f64,
}

/// Checks f(V) ≤ e^A A^C on the grid, comparing logarithms.
pub fn check_calculus_lemma(a: f64, c: f64, v_grid: &[f64]) -> Result<LemmaReport> {
    if !(c > 0.0 && a >= 4.0 * c.powi(4) + 1.0) {
        return Err(invalid("A", format!("need C > 0 and A >= 4C^4 + 1, got A = {a}, C = {c}")));
    }
    if let Some(v) = v_grid.iter().find(|&&v| !(v > c.exp())) {
        return Err(invalid("V", format!("{v} not above e^C = {}", c.exp())));
    }
    let log_bound = a + c * a.ln();
    let mut report = LemmaReport {
        a,
        c,
        points: v_grid.len(),
        violations: 0,
        min_log_slack: f64::INFINITY,
        worst_v: f64::NAN,
    };
    for &v in v_grid {
        let f = calculus_lemma_f(a, c, v);
        if f <= 0.0 {
            continue;
        }
        let slack = log_bound - f.ln();
        if slack < 0.0 {
            report.violations += 1;
        }
        if slack < report.min_log_slack {
            report.min_log_slack = slack;
            report.worst_v = v;
        }
    }
    Ok(report)
}

/// max over 16 ≤ N ≤ limit of |M(N)| / envelope(N, ε).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub limit: u64,
    pub epsilon: f64,
    pub max_ratio: f64,
    pub argmax: u64,
    pub all_finite: bool,
    /// (N, M(N), ratio) at N = 16 and every power-of-ten and power-of-two
    /// checkpoint.
    pub checkpoints: Vec<(u64, i64, f64)>,
}

pub fn envelope_ratio_report(series: &MertensSeries, limit: u64, epsilon: f64) -> Result<EnvelopeReport> {
    if limit < 16 || limit > series.limit() {
        return Err(invalid("limit", format!("{limit} outside [16, {}]", series.limit())));
    }
    let mut report = EnvelopeReport {
        limit,
        epsilon,
        max_ratio: 0.0,
        argmax: 16,
        all_finite: true,
        checkpoints: Vec::new(),
    };
    let prefix = series.prefix_sums();
    for n in 16..=limit {
        let m = prefix[n as usize];
        let r = m.unsigned_abs() as f64 / crate::arith::theorem_envelope(n, epsilon)?;
        if !r.is_finite() {
            report.all_finite = false;
        }
        if r > report.max_ratio {
            report.max_ratio = r;
            report.argmax = n;
        }
        if n == 16 || n.is_power_of_two() || is_power_of_ten(n) || n == limit {
            report.checkpoints.push((n, m, r));
        }
    }
    Ok(report)
}

fn is_power_of_ten(mut n: u64) -> bool {
    while n >= 10 && n % 10 == 0 {
        n /= 10;
    }
    n == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_formula_is_exact_at_powers_of_two() {
        assert_eq!(k_formula(1 << 20), 20);
        assert_eq!(k_formula((1 << 20) - 1), 19);
        assert_eq!(k_formula(1000), 9);
    }

    #[test]
    fn powers_of_ten() {
        assert!(is_power_of_ten(1000));
        assert!(!is_power_of_ten(1200));
    }
}
