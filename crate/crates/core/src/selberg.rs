//! Beurling–Selberg majorant and minorant of the indicator of [−h, h].
//!
//! With Beurling's function
//!
//! ```text
//! B(z) = 1 + (sin πz / π)² (2/z − 2ψ₁(1+z))                       (Re z ≥ 0)
//! B(z) = −1 + 2(sin πw / πw)² + 2(sin πw / π)² (ψ₁(1+w) − 1/w)    (w = −z)
//! ```
//!
//! the pair is
//!
//! ```text
//! F₊(z) =  ½ [B(Δ(z+h)) + B(Δ(h−z))]
//! F₋(z) = −½ [B(Δ(−h−z)) + B(Δ(z−h))]
//! ```
//!
//! and, with ω = x/Δ, its Fourier transform ∫ F(u) e^{−2πiux} du is
//!
//! ```text
//! F̂±(x) = Ĵ(ω) sin(2πxh)/(πx) ± K̂(ω) cos(2πxh)/Δ     (|x| < Δ)
//! Ĵ(ω) = πω(1−|ω|) cot(πω) + |ω|,   K̂(ω) = 1 − |ω|
//! ```
//!
//! and zero for |x| ≥ Δ.
//!
//! On the real line B(x) − sgn x is evaluated in a form that is manifestly
//! non-negative, so the sandwich inequalities hold exactly in floating point.

use crate::error::{invalid, Result};
use crate::special::trigamma;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which member of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// The extremal pair for half-length `h` and bandwidth `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelbergPair {
    h: f64,
    delta: f64,
}

const B_EVEN: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Σ_k B_{2k} x^{−2k−1}, the tail of the trigamma expansion.
fn trigamma_tail(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    let mut p = r2 * r;
    let mut s = 0.0;
    for b in B_EVEN {
        s += b * p;
        p *= r2;
    }
    s
}

/// 1/x − ψ₁(1+x) ≥ 0 for x > 0.
fn phi_plus(x: f64) -> f64 {
    if x >= 20.0 {
        0.5 / (x * x) - trigamma_tail(x)
    } else {
        1.0 / x - trigamma(Complex64::new(1.0 + x, 0.0)).re
    }
}

/// 1/y² + ψ₁(1+y) − 1/y = ψ₁(y) − 1/y ≥ 0 for y > 0.
fn phi_minus(y: f64) -> f64 {
    if y >= 20.0 {
        0.5 / (y * y) + trigamma_tail(y)
    } else {
        trigamma(Complex64::new(y, 0.0)).re - 1.0 / y
    }
}

/// B(x) − sgn(x) on the real line, with sgn(0) = 1. Always ≥ 0.
fn beurling_excess(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let y = x.abs();
    let s = (PI * y).sin() / PI;
    if x > 0.0 {
        2.0 * s * s * phi_plus(y)
    } else {
        2.0 * s * s * phi_minus(y)
    }
}

fn sgn(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Beurling's function at a complex argument.
pub fn beurling(z: Complex64) -> Complex64 {
    if z.norm() == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    if z.re >= 0.0 {
        let s = (z * PI).sin() / PI;
        1.0 + s * s * (2.0 / z - 2.0 * trigamma(z + 1.0))
    } else {
        let w = -z;
        let s = (w * PI).sin() / PI;
        let sinc = s / w;
        -1.0 + 2.0 * sinc * sinc + 2.0 * s * s * (trigamma(w + 1.0) - w.inv())
    }
}

/// Ĵ(ω) for |ω| < 1.
fn j_hat(omega: f64) -> f64 {
    let a = omega.abs();
    let x = PI * a;
    let xcot = if x < 1e-4 {
        1.0 - x * x / 3.0 - x.powi(4) / 45.0
    } else {
        x / x.tan()
    };
    (1.0 - a) * xcot + a
}

impl SelbergPair {
    pub fn new(h: f64, delta: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(invalid("h", format!("{h} must be positive and finite")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(invalid("delta", format!("{delta} must be positive and finite")));
        }
        Ok(Self { h, delta })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// F±(u) on the real line.
    pub fn eval_time(&self, sign: Sign, u: f64) -> f64 {
        let d = self.delta;
        let h = self.h;
        match sign {
            Sign::Plus => {
                let (a, b) = (d * (u + h), d * (h - u));
                0.5 * (sgn(a) + sgn(b)) + 0.5 * (beurling_excess(a) + beurling_excess(b))
            }
            Sign::Minus => {
                let (a, b) = (-d * (u + h), d * (u - h));
                -0.5 * (sgn(a) + sgn(b)) - 0.5 * (beurling_excess(a) + beurling_excess(b))
            }
        }
    }

    /// F±(z) at a complex argument.
    pub fn eval_complex(&self, sign: Sign, z: Complex64) -> Complex64 {
        let d = self.delta;
        let h = self.h;
        match sign {
            Sign::Plus => 0.5 * (beurling((z + h) * d) + beurling((h - z) * d)),
            Sign::Minus => -0.5 * (beurling((-h - z) * d) + beurling((z - h) * d)),
        }
    }

    /// F̂±(x), exactly zero for |x| ≥ Δ.
    pub fn eval_fourier(&self, sign: Sign, x: f64) -> f64 {
        let d = self.delta;
        let a = x.abs();
        if a >= d {
            return 0.0;
        }
        let omega = a / d;
        let sine_part = if a == 0.0 {
            2.0 * self.h
        } else {
            (2.0 * PI * a * self.h).sin() / (PI * a)
        };
        j_hat(omega) * sine_part + sign.factor() * (1.0 - omega) * (2.0 * PI * a * self.h).cos() / d
    }

    /// (F̂₊(x), F̂₋(x)) sharing the transcendental work.
    pub fn eval_fourier_both(&self, x: f64) -> (f64, f64) {
        let d = self.delta;
        let a = x.abs();
        if a >= d {
            return (0.0, 0.0);
        }
        let omega = a / d;
        let (s, c) = (2.0 * PI * a * self.h).sin_cos();
        let sine_part = if a == 0.0 { 2.0 * self.h } else { s / (PI * a) };
        let common = j_hat(omega) * sine_part;
        let corr = (1.0 - omega) * c / d;
        (common + corr, common - corr)
    }

    /// Rigorous bound |F±(u)| ≤ 3 / (2π²Δ²(|u| − h)²) for |u| > h.
    pub fn decay_envelope(&self, u: f64) -> f64 {
        let r = u.abs() - self.h;
        if r <= 0.0 {
            return f64::INFINITY;
        }
        1.5 / (PI * PI * self.delta * self.delta * r * r)
    }

    /// ∫_{|u| > r} |F±(u)| du bounded through [`Self::decay_envelope`].
    pub fn tail_mass(&self, r: f64) -> f64 {
        let d = r - self.h;
        if d <= 0.0 {
            return f64::INFINITY;
        }
        3.0 / (PI * PI * self.delta * self.delta * d)
    }
}
