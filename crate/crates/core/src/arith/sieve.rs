//! Linear sieve over smallest prime factors and the arithmetic functions
//! derived from it: Lambda, lambda, Omega, lambda_k, d_r.
//!
//! One u32 entry per integer is stored; everything else is recomputed from
//! the factorization in O(log n) per query.

use crate::error::{Error, Result};

/// Default memory budget for the sieve table, in bytes.
pub const DEFAULT_SIEVE_BUDGET: u64 = 1 << 30;

/// Smallest-prime-factor table up to `limit`, plus derived arithmetic functions.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorTables {
    limit: u64,
    /// spf[n] = smallest prime factor of n (spf[p] = p for primes); 0 for n < 2.
    spf: Vec<u32>,
}

impl FactorTables {
    /// Build the table with the default memory budget.
    pub fn build(limit: u64) -> Result<Self> {
        Self::build_with_budget(limit, DEFAULT_SIEVE_BUDGET)
    }

    /// Build the table; errors if `4*(limit+1)` exceeds `budget_bytes` or limit > 2^31.
    pub fn build_with_budget(limit: u64, budget_bytes: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::InvalidParameter(format!("sieve limit {limit} < 2")));
        }
        if limit > (1 << 31) {
            return Err(Error::Capacity {
                what: "sieve",
                needed: limit,
                budget: 1 << 31,
            });
        }
        let bytes = 4 * (limit + 1);
        if bytes > budget_bytes {
            return Err(Error::Capacity {
                what: "sieve bytes",
                needed: bytes,
                budget: budget_bytes,
            });
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let spf_i = spf[i];
            for &p in &primes {
                if p > spf_i || (p as usize) > n / i {
                    break;
                }
                spf[i * p as usize] = p;
            }
        }
        Ok(FactorTables { limit, spf })
    }

    /// Reconstruct from a raw spf table (cache deserialization path).
    pub(crate) fn from_raw(limit: u64, spf: Vec<u32>) -> Self {
        debug_assert_eq!(spf.len() as u64, limit + 1);
        FactorTables { limit, spf }
    }

    pub(crate) fn raw_spf(&self) -> &[u32] {
        &self.spf
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn check(&self, n: u64) -> Result<usize> {
        if n == 0 || n > self.limit {
            return Err(Error::OutOfRange { n, limit: self.limit });
        }
        Ok(n as usize)
    }

    /// Smallest prime factor of n (n >= 2).
    pub fn spf(&self, n: u64) -> Result<u32> {
        let i = self.check(n)?;
        if n < 2 {
            return Err(Error::OutOfRange { n, limit: self.limit });
        }
        Ok(self.spf[i])
    }

    /// Prime factorization of n as (p, exponent) pairs, p ascending. n = 1 gives [].
    pub fn factorize(&self, n: u64) -> Result<Vec<(u32, u32)>> {
        let mut i = self.check(n)?;
        let mut out = Vec::new();
        while i > 1 {
            let p = self.spf[i] as usize;
            let mut e = 0;
            while i % p == 0 {
                i /= p;
                e += 1;
            }
            out.push((p as u32, e));
        }
        Ok(out)
    }

    /// Omega(n): number of prime factors counted with multiplicity.
    pub fn big_omega(&self, n: u64) -> Result<u32> {
        let mut i = self.check(n)?;
        let mut count = 0;
        while i > 1 {
            i /= self.spf[i] as usize;
            count += 1;
        }
        Ok(count)
    }

    /// Liouville lambda(n) = (-1)^Omega(n).
    pub fn lambda(&self, n: u64) -> Result<i8> {
        Ok(if self.big_omega(n)? % 2 == 0 { 1 } else { -1 })
    }

    /// lambda_k(n) = (-1)^floor(Omega(n)/k).
    pub fn lambda_k(&self, n: u64, k: u32) -> Result<i8> {
        if k == 0 {
            return Err(Error::InvalidParameter("lambda_k needs k >= 1".into()));
        }
        Ok(if (self.big_omega(n)? / k) % 2 == 0 { 1 } else { -1 })
    }

    /// von Mangoldt Lambda(n): log p when n = p^j, else 0. Natural log.
    pub fn mangoldt(&self, n: u64) -> Result<f64> {
        let mut i = self.check(n)?;
        if i == 1 {
            return Ok(0.0);
        }
        let p = self.spf[i] as usize;
        while i % p == 0 {
            i /= p;
        }
        Ok(if i == 1 { (p as f64).ln() } else { 0.0 })
    }

    /// Generalized divisor function d_r(n) = prod binom(e_i + r - 1, e_i), exact.
    pub fn divisor_r(&self, n: u64, r: u32) -> Result<u64> {
        if r == 0 {
            return Err(Error::InvalidParameter("divisor_r needs r >= 1".into()));
        }
        let mut acc: u128 = 1;
        for (_, e) in self.factorize(n)? {
            acc = acc
                .checked_mul(binomial_u128(e as u64 + r as u64 - 1, e as u64).ok_or_else(
                    || Error::InvalidParameter(format!("d_{r} overflow at exponent {e}")),
                )?)
                .ok_or_else(|| Error::InvalidParameter(format!("d_{r}({n}) overflows u128")))?;
        }
        u64::try_from(acc)
            .map_err(|_| Error::InvalidParameter(format!("d_{r}({n}) does not fit in u64")))
    }

    /// All primes p <= upper, from the spf table.
    pub fn primes_upto(&self, upper: u64) -> Vec<u32> {
        let hi = upper.min(self.limit) as usize;
        (2..=hi)
            .filter(|&i| self.spf[i] as usize == i)
            .map(|i| i as u32)
            .collect()
    }

    /// All prime powers q = p^j with q strictly below `upper`, ascending,
    /// as (q, log p, j). Errors if the table does not reach `upper`.
    pub fn prime_powers_below(&self, upper: f64) -> Result<Vec<PrimePower>> {
        let nmax = crate::arith::max_n_below(upper);
        if nmax > self.limit {
            return Err(Error::TablesTooSmall { limit: self.limit, needed: nmax });
        }
        let mut out = Vec::new();
        for p in self.primes_upto(nmax) {
            let logp = (p as f64).ln();
            let mut q = p as u64;
            let mut j = 1u32;
            while (q as f64) < upper && q <= nmax {
                out.push(PrimePower { q, log_p: logp, exponent: j });
                match q.checked_mul(p as u64) {
                    Some(next) => q = next,
                    None => break,
                }
                j += 1;
            }
        }
        out.sort_by_key(|pp| pp.q);
        Ok(out)
    }
}

/// A prime power q = p^exponent with cached log p ( = Lambda(q) ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimePower {
    pub q: u64,
    pub log_p: f64,
    pub exponent: u32,
}

fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128;
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values_match_definitions() {
        let t = FactorTables::build(100).unwrap();
        assert_eq!(t.mangoldt(8).unwrap(), 2f64.ln());
        assert_eq!(t.mangoldt(6).unwrap(), 0.0);
        assert_eq!(t.mangoldt(1).unwrap(), 0.0);
        assert_eq!(t.lambda(6).unwrap(), 1); // Omega(6) = 2
        assert_eq!(t.lambda(30).unwrap(), -1); // 30 = 2*3*5
        assert_eq!(t.big_omega(30).unwrap(), 3);
        assert_eq!(t.big_omega(1).unwrap(), 0);
    }

    #[test]
    fn spf_divides_and_is_prime() {
        let t = FactorTables::build(10_000).unwrap();
        for n in 2..=10_000u64 {
            let p = t.spf(n).unwrap() as u64;
            assert_eq!(n % p, 0, "spf({n}) = {p} must divide");
            assert_eq!(t.spf(p).unwrap() as u64, p, "spf({n}) = {p} must be prime");
        }
    }

    #[test]
    fn lambda_matches_omega_parity() {
        let t = FactorTables::build(5_000).unwrap();
        for n in 1..=5_000u64 {
            let expect = if t.big_omega(n).unwrap() % 2 == 0 { 1 } else { -1 };
            assert_eq!(t.lambda(n).unwrap(), expect);
        }
    }

    #[test]
    fn lambda_k_examples() {
        let t = FactorTables::build(1_000).unwrap();
        // lambda_2(1) = lambda_2(p) = 1, lambda_2(p1 p2) = lambda_2(p1 p2 p3) = -1
        assert_eq!(t.lambda_k(1, 2).unwrap(), 1);
        assert_eq!(t.lambda_k(7, 2).unwrap(), 1);
        assert_eq!(t.lambda_k(6, 2).unwrap(), -1);
        assert_eq!(t.lambda_k(30, 2).unwrap(), -1);
        assert_eq!(t.lambda_k(210, 2).unwrap(), 1); // Omega = 4
    }

    #[test]
    fn divisor_r_examples() {
        let t = FactorTables::build(1_000).unwrap();
        assert_eq!(t.divisor_r(12, 2).unwrap(), 6); // d(12) = 6
        assert_eq!(t.divisor_r(1, 5).unwrap(), 1);
        // d_3(p^2) = C(4, 2) = 6
        assert_eq!(t.divisor_r(49, 3).unwrap(), 6);
        // d_1 is identically 1
        for n in 1..100 {
            assert_eq!(t.divisor_r(n, 1).unwrap(), 1);
        }
    }

    #[test]
    fn psi_sanity_band() {
        // prime number theorem band on psi(N) = sum of mangoldt
        let n = 100_000u64;
        let t = FactorTables::build(n).unwrap();
        let psi: f64 = (1..=n).map(|m| t.mangoldt(m).unwrap()).sum();
        assert!(psi > 0.9 * n as f64 && psi < 1.1 * n as f64, "psi = {psi}");
    }

    #[test]
    fn capacity_errors() {
        assert!(matches!(
            FactorTables::build_with_budget(1 << 20, 1024),
            Err(Error::Capacity { .. })
        ));
        assert!(matches!(
            FactorTables::build((1 << 31) + 1),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn out_of_range_query() {
        let t = FactorTables::build(100).unwrap();
        assert!(matches!(t.lambda(101), Err(Error::OutOfRange { .. })));
        assert!(matches!(t.mangoldt(0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn prime_powers_enumeration() {
        let t = FactorTables::build(100).unwrap();
        let pps = t.prime_powers_below(32.0).unwrap();
        let qs: Vec<u64> = pps.iter().map(|pp| pp.q).collect();
        assert_eq!(qs, vec![2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31]);
        for pp in &pps {
            assert_eq!(t.mangoldt(pp.q).unwrap(), pp.log_p);
        }
    }
}
