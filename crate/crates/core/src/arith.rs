//! Sieved arithmetic tables: Möbius function, divisor count, von Mangoldt.

use crate::error::{Error, Result};

/// Default upper limit accepted by [`ArithmeticTables::build`].
pub const DEFAULT_TABLE_CAP: usize = 1_000_000_000;

/// `mu(n)`, `d(n)` and `Lambda(n)` for `1 <= n <= limit`.
///
/// Index 0 holds placeholders; all accessors take `n` directly.
#[derive(Debug, Clone)]
pub struct ArithmeticTables {
    limit: usize,
    mobius: Vec<i8>,
    divisor_count: Vec<u32>,
    von_mangoldt: Vec<f64>,
    primes: Vec<u32>,
}

impl ArithmeticTables {
    pub fn build(limit: usize) -> Result<Self> {
        Self::build_capped(limit, DEFAULT_TABLE_CAP)
    }

    /// Linear sieve; every composite is visited once, through its smallest prime.
    pub fn build_capped(limit: usize, cap: usize) -> Result<Self> {
        if limit == 0 {
            return Err(Error::Domain("table limit must be >= 1".into()));
        }
        if limit > cap {
            return Err(Error::Capacity {
                requested: limit as u64,
                cap: cap as u64,
            });
        }
        let len = limit + 1;
        let mut mobius = vec![0i8; len];
        let mut divisor_count = vec![0u32; len];
        let mut von_mangoldt = vec![0.0f64; len];
        // exponent of the smallest prime factor
        let mut spf_exp = vec![0u8; len];
        let mut is_composite = vec![false; len];
        let mut primes: Vec<u32> = Vec::new();

        mobius[1] = 1;
        divisor_count[1] = 1;
        for i in 2..len {
            if !is_composite[i] {
                primes.push(i as u32);
                mobius[i] = -1;
                divisor_count[i] = 2;
                spf_exp[i] = 1;
                von_mangoldt[i] = (i as f64).ln();
            }
            for &p in &primes {
                let p = p as usize;
                let ip = i * p;
                if ip > limit {
                    break;
                }
                is_composite[ip] = true;
                if i % p == 0 {
                    let e = spf_exp[i] as u32;
                    spf_exp[ip] = spf_exp[i] + 1;
                    divisor_count[ip] = divisor_count[i] / (e + 1) * (e + 2);
                    mobius[ip] = 0;
                    if von_mangoldt[i] > 0.0 {
                        von_mangoldt[ip] = von_mangoldt[p];
                    }
                    break;
                }
                spf_exp[ip] = 1;
                divisor_count[ip] = divisor_count[i] * 2;
                mobius[ip] = -mobius[i];
            }
        }
        Ok(Self {
            limit,
            mobius,
            divisor_count,
            von_mangoldt,
            primes,
        })
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn mobius(&self, n: usize) -> i8 {
        self.mobius[n]
    }

    pub fn divisor_count(&self, n: usize) -> u32 {
        self.divisor_count[n]
    }

    pub fn von_mangoldt(&self, n: usize) -> f64 {
        self.von_mangoldt[n]
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Error unless `n <= limit`.
    pub fn require(&self, n: usize) -> Result<()> {
        if n > self.limit {
            Err(Error::TableTooSmall {
                needed: n as u64,
                limit: self.limit as u64,
            })
        } else {
            Ok(())
        }
    }
}

/// Divisor counts `d(n)` for `lo <= n < hi` (`lo >= 1`), without a full table.
///
/// Each divisor pair `(a, n/a)` with `a <= sqrt(n)` is counted at its
/// smaller member.
pub fn divisor_counts_range(lo: u64, hi: u64) -> Vec<u32> {
    assert!(lo >= 1 && hi >= lo);
    let mut out = vec![0u32; (hi - lo) as usize];
    if hi == lo {
        return out;
    }
    let top = integer_sqrt(hi - 1);
    for a in 1..=top {
        let sq = a * a;
        let start = sq.max(lo.div_ceil(a) * a);
        let mut m = start;
        while m < hi {
            out[(m - lo) as usize] += if m == sq { 1 } else { 2 };
            m += a;
        }
    }
    out
}

pub fn integer_sqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}
