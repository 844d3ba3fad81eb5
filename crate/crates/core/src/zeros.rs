//! Tables of critical-line zero ordinates: parsing, generation, counting and
//! zero sums.
//!
//! Every zero is taken to lie on the critical line; a table stores only the
//! positive ordinates γ together with the interval it covers completely.

use crate::error::{invalid, Error, Result};
use crate::quadrature::gl20_panel;
use crate::special::{theta_exact, theta_prime};
use crate::zeta::{hardy_z, ComplexPoint, EvalPrecision};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::{BufRead, Write};
use std::sync::OnceLock;

/// Sorted positive zero ordinates with provenance and coverage.
#[derive(Debug, Clone)]
pub struct ZeroTable {
    ordinates: Vec<f64>,
    source: String,
    span: Option<(f64, f64)>,
    s_sup: OnceLock<f64>,
}

/// Σ over zero pairs of 1/(s−ρ) + 1/(s−ρ̄), split into the explicit window
/// and a density model for the rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroSum {
    pub explicit: Complex64,
    pub explicit_count: usize,
    pub model: Complex64,
    pub remainder: f64,
}

/// The zero sum F(s) = Σ_ρ Re 1/(s − ρ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FSum {
    /// Truncated sum plus the tail model.
    pub value: f64,
    /// Sum over zeros with |γ − t| ≤ window (both γ and −γ).
    pub truncated: f64,
    /// Model contribution of the zeros outside the window.
    pub tail_estimate: f64,
    /// Bound on |value − F(s)|.
    pub remainder: f64,
    pub zeros_in_window: usize,
}

fn check_increasing(ordinates: &[f64]) -> Result<()> {
    for (i, w) in ordinates.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(Error::Parse {
                line: i + 2,
                reason: format!("ordinate {} not above its predecessor {}", w[1], w[0]),
            });
        }
    }
    if let Some(&g) = ordinates.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
        return Err(invalid("ordinates", format!("{g} is not a positive finite real")));
    }
    Ok(())
}

impl ZeroTable {
    /// A table of the first zeros; `span_hi` defaults to the last ordinate.
    pub fn new(ordinates: Vec<f64>, source: impl Into<String>, span_hi: Option<f64>) -> Result<Self> {
        check_increasing(&ordinates)?;
        let span = match (ordinates.first(), ordinates.last()) {
            (Some(&first), Some(&last)) => {
                if !(first > 14.0 && first < 14.2) {
                    return Err(invalid(
                        "ordinates",
                        format!("first ordinate {first} fails the first-zero gate (14, 14.2)"),
                    ));
                }
                let hi = span_hi.unwrap_or(last);
                if hi < last {
                    return Err(invalid("span", format!("declared end {hi} below last ordinate {last}")));
                }
                Some((0.0, hi))
            }
            _ => None,
        };
        Ok(Self {
            ordinates,
            source: source.into(),
            span,
            s_sup: OnceLock::new(),
        })
    }

    /// A table for experiments: no first-zero gate, explicit coverage.
    pub fn synthetic(ordinates: Vec<f64>, lo: f64, hi: f64, source: impl Into<String>) -> Result<Self> {
        check_increasing(&ordinates)?;
        if !(lo <= hi) || ordinates.iter().any(|&g| g < lo || g > hi) {
            return Err(invalid("span", "ordinates must lie inside [lo, hi]"));
        }
        Ok(Self {
            ordinates,
            source: source.into(),
            span: Some((lo, hi)),
            s_sup: OnceLock::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn span(&self) -> Option<(f64, f64)> {
        self.span
    }

    /// Fails unless `[a, b]` lies inside the covered interval. A span that
    /// starts at 0 also covers negative abscissas, where no ordinate lives.
    pub fn require(&self, a: f64, b: f64) -> Result<()> {
        let (lo, hi) = self.span.ok_or(Error::EmptyTable)?;
        let a_eff = if lo == 0.0 { a.max(0.0) } else { a };
        if a_eff < lo || b > hi || !(a <= b) {
            return Err(Error::Coverage {
                need_lo: a,
                need_hi: b,
                have_lo: lo,
                have_hi: hi,
            });
        }
        Ok(())
    }

    /// N(t): ordinates in (0, t].
    pub fn count_upto(&self, t: f64) -> Result<usize> {
        self.require(t, t)?;
        Ok(self.ordinates.partition_point(|&g| g <= t))
    }

    /// Ordinates in the half-open window (t − h, t + h].
    pub fn window_count(&self, t: f64, h: f64) -> Result<usize> {
        if !(h > 0.0) {
            return Err(invalid("h", "must be positive"));
        }
        self.require(t - h, t + h)?;
        Ok(self.count_le(t + h) - self.count_le(t - h))
    }

    pub(crate) fn count_le(&self, t: f64) -> usize {
        self.ordinates.partition_point(|&g| g <= t)
    }

    pub(crate) fn count_lt(&self, t: f64) -> usize {
        self.ordinates.partition_point(|&g| g < t)
    }

    /// Ordinates in the closed interval [a, b].
    pub fn between(&self, a: f64, b: f64) -> &[f64] {
        let i = self.count_lt(a);
        let j = self.count_le(b);
        if j <= i {
            &self.ordinates[0..0]
        } else {
            &self.ordinates[i..j]
        }
    }

    /// S(t) = N(t) − θ(t)/π − 1.
    pub fn argument_s(&self, t: f64) -> Result<f64> {
        Ok(self.count_upto(t)? as f64 - theta_exact(t) / PI - 1.0)
    }

    /// sup |S| over the table, sampled on both sides of every jump.
    pub fn s_sup(&self) -> f64 {
        *self.s_sup.get_or_init(|| {
            let mut m: f64 = 1.0;
            for (j, &g) in self.ordinates.iter().enumerate() {
                let smooth = theta_exact(g) / PI + 1.0;
                m = m.max((j as f64 - smooth).abs()).max((j as f64 + 1.0 - smooth).abs());
            }
            m
        })
    }

    /// Σ_{γ>0} [1/(z − ½ − iγ) + 1/(z − ½ + iγ)] for Im z ≥ 0.
    pub fn zero_pair_sum(&self, z: Complex64, window: f64) -> Result<ZeroSum> {
        if self.is_empty() {
            return Err(Error::EmptyTable);
        }
        if z.im < 0.0 {
            return Err(invalid("z", "expected Im z >= 0"));
        }
        let t = z.im;
        let a = t - window;
        let b = t + window;
        self.require(a, b)?;
        let (_, hi) = self.span.expect("non-empty");
        let w = z - 0.5;
        let w2 = w * w;
        if self
            .between(b.min(a.max(0.0)), b)
            .iter()
            .any(|&g| (w2 + g * g).norm() < 1e-24)
        {
            return Err(Error::Pole(format!("z = {z} is a tabulated zero")));
        }
        let g = |u: f64| 2.0 * w / (w2 + u * u);
        let dg = |u: f64| {
            let d = w2 + u * u;
            -4.0 * w * u / (d * d)
        };
        let dens = |u: f64| g(u) * (theta_prime(u) / PI);

        let inside = self.between(a.max(0.0), b);
        let explicit: Complex64 = inside.iter().map(|&u| g(u)).sum();

        let s_sup = self.s_sup();
        let s_far = (2.0 * s_sup).max(1.0);
        let x_far = (1e4 * (t + window)).max(1e6);

        // Zeros above the window.
        let s_b = self.count_le(b) as f64 - theta_exact(b) / PI - 1.0;
        let mut model = -g(b) * s_b;
        let mut dg_near = 0.0;
        let mut dg_far = 0.0;
        for (lo, hi_p) in panels(b, x_far, t, window) {
            model += gl20_panel(&mut |u| dens(u), lo, hi_p);
            let var = gl20_panel(&mut |u| dg(u).norm(), lo, hi_p);
            if hi_p <= hi {
                dg_near += var;
            } else if lo >= hi {
                dg_far += var;
            } else {
                dg_near += gl20_panel(&mut |u| dg(u).norm(), lo, hi);
                dg_far += gl20_panel(&mut |u| dg(u).norm(), hi, hi_p);
            }
        }
        model += w / PI * ((x_far / (2.0 * PI)).ln() + 1.0) / x_far;
        dg_far += 2.0 * w.norm() / (x_far * x_far);

        // Zeros below the window.
        if a > 0.0 {
            let s_a = self.count_lt(a) as f64 - theta_exact(a) / PI - 1.0;
            model += g(a) * s_a + g(0.0);
            for (lo, hi_p) in panels(0.0, a, t, window) {
                model += gl20_panel(&mut |u| dens(u), lo, hi_p);
                dg_near += gl20_panel(&mut |u| dg(u).norm(), lo, hi_p);
            }
        }
        let remainder = s_sup * dg_near + s_far * dg_far + 1e-11 * (1.0 + model.norm());
        Ok(ZeroSum {
            explicit,
            explicit_count: inside.len(),
            model,
            remainder,
        })
    }

    /// F(s) over the window |γ − t| ≤ `window` with a modelled tail.
    pub fn f_sum(&self, s: ComplexPoint, window: f64) -> Result<FSum> {
        if !(s.sigma > 0.5) {
            return Err(invalid("sigma", "must exceed 1/2"));
        }
        if !(window > 0.0) {
            return Err(invalid("window", "must be positive"));
        }
        let z = Complex64::new(s.sigma, s.t.abs());
        let zs = self.zero_pair_sum(z, window)?;
        Ok(FSum {
            value: zs.explicit.re + zs.model.re,
            truncated: zs.explicit.re,
            tail_estimate: zs.model.re,
            remainder: zs.remainder,
            zeros_in_window: zs.explicit_count,
        })
    }

    /// Writes the table in the text format read by [`load_zeros`].
    pub fn export<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# source: {}", self.source)?;
        if let Some((lo, hi)) = self.span {
            writeln!(out, "# span: {lo} {hi}")?;
        }
        for g in &self.ordinates {
            writeln!(out, "{g:.12}")?;
        }
        Ok(())
    }
}

/// Quadrature panels on [lo, hi] refined geometrically towards t ± window
/// and towards 0, so that no panel is long compared with its distance to a
/// singularity of the integrand.
fn panels(lo: f64, hi: f64, t: f64, window: f64) -> Vec<(f64, f64)> {
    let mut cuts = vec![lo, hi];
    let mut d = window;
    while d < 4.0 * hi.max(1.0) {
        for c in [t - d, t + d] {
            if c > lo && c < hi {
                cuts.push(c);
            }
        }
        d *= 2.0;
    }
    let mut c = 0.5;
    while c < hi {
        if c > lo {
            cuts.push(c);
        }
        c *= 2.0;
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * y.abs().max(1.0));
    cuts.windows(2).map(|p| (p[0], p[1])).collect()
}

/// Parses one ordinate per line; blank lines and `#` comments are skipped.
/// `# source:` and `# span:` header lines are recognised.
pub fn load_zeros<R: BufRead>(reader: R) -> Result<ZeroTable> {
    let mut ordinates = Vec::new();
    let mut source = String::from("imported");
    let mut span_hi = None;
    let mut prev = f64::NEG_INFINITY;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            reason: e.to_string(),
        })?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(comment) = text.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(rest) = comment.strip_prefix("source:") {
                source = rest.trim().to_string();
            } else if let Some(rest) = comment.strip_prefix("span:") {
                let hi = rest
                    .split_whitespace()
                    .last()
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| Error::Parse {
                        line: lineno,
                        reason: format!("malformed span header `{text}`"),
                    })?;
                span_hi = Some(hi);
            }
            continue;
        }
        let token = text.split_whitespace().next().unwrap_or(text);
        let g: f64 = token.parse().map_err(|_| Error::Parse {
            line: lineno,
            reason: format!("unparseable ordinate `{token}`"),
        })?;
        if !(g > prev) {
            return Err(Error::Parse {
                line: lineno,
                reason: format!("ordinate {g} not above its predecessor {prev}"),
            });
        }
        prev = g;
        ordinates.push(g);
    }
    ZeroTable::new(ordinates, source, span_hi)
}

/// Settings for the Hardy-Z sign-change zero finder.
#[derive(Debug, Clone, Copy)]
pub struct GeneratorConfig {
    pub start: f64,
    pub step: f64,
    pub tol: f64,
    pub chunk_points: usize,
    pub prec: EvalPrecision,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            start: 10.0,
            step: 0.01,
            tol: 1e-9,
            chunk_points: 4096,
            prec: EvalPrecision {
                abs_tol: 1e-10,
                max_terms: 10_000_000,
            },
        }
    }
}

/// Locates all zeros on (start, t_max] from sign changes of Z on a grid,
/// refining each by bisection. Chunks of the grid run in parallel.
pub fn generate_zeros(t_max: f64, cfg: &GeneratorConfig) -> Result<ZeroTable> {
    if !(t_max > cfg.start + cfg.step) || !t_max.is_finite() {
        return Err(invalid("t_max", format!("{t_max} must exceed {}", cfg.start + cfg.step)));
    }
    if !(cfg.step > 0.0 && cfg.tol > 0.0 && cfg.start >= 10.0) {
        return Err(invalid("generator", "step and tol must be positive, start >= 10"));
    }
    let m = ((t_max - cfg.start) / cfg.step).floor() as usize;
    let grid = |i: usize| cfg.start + i as f64 * cfg.step;
    let chunk = cfg.chunk_points.max(2);
    let n_chunks = m.div_ceil(chunk);
    let found: Vec<Result<Vec<f64>>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let i0 = c * chunk;
            let i1 = ((c + 1) * chunk).min(m);
            let mut zs = Vec::new();
            let mut prev = hardy_z(grid(i0), &cfg.prec)?.value;
            for i in i0..i1 {
                let (lo, hi) = (grid(i), grid(i + 1));
                let cur = hardy_z(hi, &cfg.prec)?.value;
                if cur == 0.0 && prev != 0.0 {
                    zs.push(hi);
                } else if prev * cur < 0.0 {
                    zs.push(bisect(lo, hi, prev, cfg)?);
                }
                prev = cur;
            }
            Ok(zs)
        })
        .collect();
    let mut ordinates = Vec::new();
    for part in found {
        ordinates.extend(part?);
    }
    let source = format!(
        "generated: sign changes of Hardy Z on a {} grid from {}, bisection to {:e}",
        cfg.step, cfg.start, cfg.tol
    );
    let table = ZeroTable::new(ordinates, source, Some(grid(m)))?;
    let worst = von_mangoldt_deviation(&table, 200)?;
    if worst > 3.0 {
        return Err(Error::Diagnostic(format!(
            "zero count deviates from θ/π + 1 by {worst:.2}; zeros may be missing"
        )));
    }
    Ok(table)
}

fn bisect(mut lo: f64, mut hi: f64, mut f_lo: f64, cfg: &GeneratorConfig) -> Result<f64> {
    while hi - lo > cfg.tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = hardy_z(mid, &cfg.prec)?.value;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_lo * f_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// max |N(t) − (θ(t)/π + 1)| over `samples` evenly spaced points of the span.
pub fn von_mangoldt_deviation(table: &ZeroTable, samples: usize) -> Result<f64> {
    let (_, hi) = table.span().ok_or(Error::EmptyTable)?;
    let lo = 15.0f64.min(hi);
    let mut worst: f64 = 0.0;
    for k in 0..samples.max(1) {
        let t = lo + (hi - lo) * (k as f64 + 0.5) / samples.max(1) as f64;
        let dev = table.count_upto(t)? as f64 - (theta_exact(t) / PI + 1.0);
        worst = worst.max(dev.abs());
    }
    Ok(worst)
}
