//! Sieved arithmetic functions: Möbius, von Mangoldt and Mertens prefix sums.
//!
//! A single linear sieve produces the smallest prime factor of every
//! `n <= limit`; μ and Λ are derived from it.

use crate::error::{invalid, Error, Result};

/// Largest sieve limit accepted by default (about 2 GB for all three tables).
pub const DEFAULT_BUDGET: u64 = 200_000_000;

/// μ(n) for 1 ≤ n ≤ limit.
#[derive(Debug, Clone)]
pub struct MoebiusTable {
    limit: u64,
    values: Vec<i8>,
}

/// Smallest-prime-factor table answering Λ(n) queries.
#[derive(Debug, Clone)]
pub struct MangoldtTable {
    limit: u64,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

/// M(n) prefix sums for 1 ≤ n ≤ limit.
#[derive(Debug, Clone)]
pub struct MertensSeries {
    limit: u64,
    prefix: Vec<i64>,
}

fn check_limit(limit: u64, budget: u64) -> Result<()> {
    if limit == 0 {
        return Err(invalid("limit", "must be at least 1"));
    }
    if limit > budget || limit > u32::MAX as u64 {
        return Err(Error::BudgetExceeded {
            requested: limit,
            budget: budget.min(u32::MAX as u64),
        });
    }
    Ok(())
}

fn linear_sieve(limit: usize) -> (Vec<u32>, Vec<u32>) {
    let mut spf = vec![0u32; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            if p > si {
                break;
            }
            let m = i * p as usize;
            if m > limit {
                break;
            }
            spf[m] = p;
        }
    }
    if limit >= 1 {
        spf[1] = 1;
    }
    (spf, primes)
}

/// Builds μ, Λ and M up to `limit` under [`DEFAULT_BUDGET`].
pub fn build_tables(limit: u64) -> Result<(MoebiusTable, MangoldtTable, MertensSeries)> {
    build_tables_with_budget(limit, DEFAULT_BUDGET)
}

pub fn build_tables_with_budget(
    limit: u64,
    budget: u64,
) -> Result<(MoebiusTable, MangoldtTable, MertensSeries)> {
    check_limit(limit, budget)?;
    let mangoldt = MangoldtTable::build_unchecked(limit);
    let moebius = MoebiusTable::from_spf(limit, &mangoldt.spf);
    let mertens = MertensSeries::from_moebius(&moebius);
    Ok((moebius, mangoldt, mertens))
}

impl MoebiusTable {
    pub fn new(limit: u64) -> Result<Self> {
        check_limit(limit, DEFAULT_BUDGET)?;
        let (spf, _) = linear_sieve(limit as usize);
        Ok(Self::from_spf(limit, &spf))
    }

    fn from_spf(limit: u64, spf: &[u32]) -> Self {
        let n_max = limit as usize;
        let mut values = vec![0i8; n_max + 1];
        values[1] = 1;
        for n in 2..=n_max {
            let p = spf[n] as usize;
            let m = n / p;
            values[n] = if m % p == 0 {
                0
            } else {
                -values[m]
            };
        }
        Self { limit, values }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn mu(&self, n: u64) -> Result<i8> {
        if n == 0 || n > self.limit {
            return Err(Error::OutOfRange {
                value: n as f64,
                lo: 1.0,
                hi: self.limit as f64,
            });
        }
        Ok(self.values[n as usize])
    }

    /// μ(1..=limit) as a slice indexed from 1 (index 0 is unused and zero).
    pub fn values(&self) -> &[i8] {
        &self.values
    }
}

impl MangoldtTable {
    /// Builds Λ alone, which is all the explicit formula needs at large limits.
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_budget(limit, DEFAULT_BUDGET)
    }

    pub fn with_budget(limit: u64, budget: u64) -> Result<Self> {
        check_limit(limit, budget)?;
        Ok(Self::build_unchecked(limit))
    }

    fn build_unchecked(limit: u64) -> Self {
        let (spf, primes) = linear_sieve(limit as usize);
        Self { limit, spf, primes }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn smallest_prime_factor(&self, n: u64) -> Result<u64> {
        self.ensure(n)?;
        Ok(self.spf[n as usize] as u64)
    }

    fn ensure(&self, n: u64) -> Result<()> {
        if n > self.limit {
            return Err(Error::TableTooShort {
                need: n,
                have: self.limit,
            });
        }
        if n == 0 {
            return Err(invalid("n", "must be positive"));
        }
        Ok(())
    }

    /// Λ(n): log p when n = p^k, zero otherwise.
    pub fn lambda(&self, n: u64) -> Result<f64> {
        self.ensure(n)?;
        Ok(self.lambda_unchecked(n as usize))
    }

    #[inline]
    pub(crate) fn lambda_unchecked(&self, n: usize) -> f64 {
        if n < 2 {
            return 0.0;
        }
        let p = self.spf[n] as usize;
        let mut m = n;
        while m % p == 0 {
            m /= p;
        }
        if m == 1 {
            (p as f64).ln()
        } else {
            0.0
        }
    }

    /// Primes up to the table limit, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Primes `p <= x`.
    pub fn primes_upto(&self, x: u64) -> Result<&[u32]> {
        if x > self.limit {
            return Err(Error::TableTooShort {
                need: x,
                have: self.limit,
            });
        }
        let end = self.primes.partition_point(|&p| (p as u64) <= x);
        Ok(&self.primes[..end])
    }

    /// Every prime power `p^k <= x` paired with `log p`, grouped by prime.
    pub fn prime_powers_upto(&self, x: u64) -> Result<Vec<(u64, f64)>> {
        let primes = self.primes_upto(x)?;
        let mut out = Vec::with_capacity(primes.len() + primes.len() / 8);
        for &p in primes {
            let p = p as u64;
            let lp = (p as f64).ln();
            let mut q = p;
            loop {
                out.push((q, lp));
                match q.checked_mul(p) {
                    Some(next) if next <= x => q = next,
                    _ => break,
                }
            }
        }
        Ok(out)
    }
}

impl MertensSeries {
    pub fn new(limit: u64) -> Result<Self> {
        Ok(Self::from_moebius(&MoebiusTable::new(limit)?))
    }

    pub fn from_moebius(mu: &MoebiusTable) -> Self {
        let mut prefix = vec![0i64; mu.values.len()];
        let mut acc = 0i64;
        for n in 1..mu.values.len() {
            acc += mu.values[n] as i64;
            prefix[n] = acc;
        }
        Self {
            limit: mu.limit,
            prefix,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Prefix sums indexed from 1 (index 0 holds M(0) = 0).
    pub fn prefix_sums(&self) -> &[i64] {
        &self.prefix
    }
}

/// M(N) read from the prefix sums.
pub fn mertens(series: &MertensSeries, n: u64) -> Result<i64> {
    if n == 0 || n > series.limit {
        return Err(Error::OutOfRange {
            value: n as f64,
            lo: 1.0,
            hi: series.limit as f64,
        });
    }
    Ok(series.prefix[n as usize])
}

/// √N · exp((log N)^{1/2} (log log N)^{5/2+ε}).
pub fn theorem_envelope(n: u64, epsilon: f64) -> Result<f64> {
    if n < 16 {
        return Err(invalid("N", format!("{n} < 16, double logarithm too small")));
    }
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(invalid("epsilon", "must be finite and non-negative"));
    }
    let nf = n as f64;
    let l = nf.ln();
    Ok(nf.sqrt() * (l.sqrt() * l.ln().powf(2.5 + epsilon)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_tables() {
        let (mu, _, m) = build_tables(1).unwrap();
        assert_eq!(mu.mu(1).unwrap(), 1);
        assert_eq!(mertens(&m, 1).unwrap(), 1);
        let (_, _, m) = build_tables(10).unwrap();
        assert_eq!(mertens(&m, 2).unwrap(), 0);
        assert_eq!(mertens(&m, 10).unwrap(), -1);
    }

    #[test]
    fn rejects_zero_and_over_budget() {
        assert!(build_tables(0).is_err());
        assert!(matches!(
            build_tables_with_budget(1000, 10),
            Err(Error::BudgetExceeded { .. })
        ));
        let (_, _, m) = build_tables(10).unwrap();
        assert!(mertens(&m, 11).is_err());
        assert!(mertens(&m, 0).is_err());
    }

    #[test]
    fn mangoldt_values() {
        let t = MangoldtTable::new(100).unwrap();
        assert_eq!(t.lambda(1).unwrap(), 0.0);
        assert!((t.lambda(8).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(t.lambda(12).unwrap(), 0.0);
        assert!((t.lambda(97).unwrap() - 97f64.ln()).abs() < 1e-15);
        let pp: Vec<u64> = t.prime_powers_upto(10).unwrap().iter().map(|x| x.0).collect();
        assert_eq!(pp, vec![2, 4, 8, 3, 9, 5, 7]);
    }

    #[test]
    fn envelope_formula() {
        let l = 16f64.ln();
        let want = 4.0 * (l.sqrt() * l.ln().powf(2.5)).exp();
        assert!((theorem_envelope(16, 0.0).unwrap() - want).abs() < 1e-12 * want);
        assert!(theorem_envelope(15, 0.0).is_err());
        let a = theorem_envelope(1_000_000, 0.5).unwrap();
        assert!(a.is_finite() && a > 1e3);
        assert!(theorem_envelope(1_000_000, 0.6).unwrap() > a);
    }
}
