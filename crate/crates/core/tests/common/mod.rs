#![allow(dead_code)]

use mertens_core::arith::{build_tables, MangoldtTable, MertensSeries, MoebiusTable};
use mertens_core::zeros::{generate_zeros, GeneratorConfig, ZeroTable};
use std::sync::OnceLock;

/// Zeros up to this height cover every fixture below.
pub const ZERO_HEIGHT: f64 = 5000.0;

pub fn zeros() -> &'static ZeroTable {
    static TABLE: OnceLock<ZeroTable> = OnceLock::new();
    TABLE.get_or_init(|| generate_zeros(ZERO_HEIGHT, &GeneratorConfig::default()).expect("zero generation"))
}

pub struct Tables {
    pub moebius: MoebiusTable,
    pub mangoldt: MangoldtTable,
    pub mertens: MertensSeries,
}

/// Sieved tables to 10⁶.
pub fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let (moebius, mangoldt, mertens) = build_tables(1_000_000).expect("sieve");
        Tables {
            moebius,
            mangoldt,
            mertens,
        }
    })
}

/// μ(n) by trial division.
pub fn mu_trial(mut n: u64) -> i8 {
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Λ(n) by trial division.
pub fn lambda_trial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut m = n;
            while m % p == 0 {
                m /= p;
            }
            return if m == 1 { (p as f64).ln() } else { 0.0 };
        }
        p += 1;
    }
    (n as f64).ln()
}

pub fn mertens_trial_prefix(limit: u64) -> Vec<i64> {
    let mut out = vec![0i64; limit as usize + 1];
    for n in 1..=limit {
        out[n as usize] = out[n as usize - 1] + mu_trial(n) as i64;
    }
    out
}
