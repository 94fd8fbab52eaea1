//! Segmented sieving, Chebyshev sums and interval censuses.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::integer_sqrt;
use crate::check::BoundCheckRecord;
use crate::error::{Error, Result};
use crate::sum::Neumaier;

/// Odd entries per segment.
pub const DEFAULT_SEGMENT: usize = 1 << 22;
pub const SIEVE_HI_MAX: u64 = 10_000_000_000_000;
pub const SIEVE_WIDTH_MAX: u64 = 1_000_000_000;
pub const PSI_MAX: u64 = 1_000_000_000;

/// Primes up to `n` by a plain sieve; used for base primes.
pub fn small_primes(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Composite flags for the odd numbers `start, start + 2, ...` (`len` of them),
/// `start` odd. Bit set means composite or 1.
fn sieve_odd_block(start: u64, len: usize, base: &[u64]) -> Vec<u64> {
    let mut bits = vec![0u64; len.div_ceil(64)];
    let end = start + 2 * len as u64;
    for &p in base.iter().skip_while(|&&p| p == 2) {
        let sq = p * p;
        if sq >= end {
            break;
        }
        let mut m = if sq >= start { sq } else { start.div_ceil(p) * p };
        if m % 2 == 0 {
            m += p;
        }
        let mut i = ((m - start) / 2) as usize;
        while i < len {
            bits[i >> 6] |= 1 << (i & 63);
            i += p as usize;
        }
    }
    if start == 1 {
        bits[0] |= 1;
    }
    bits
}

/// Exact primality of `[lo, hi)`.
#[derive(Debug, Clone)]
pub struct SieveSegment {
    pub lo: u64,
    pub hi: u64,
    /// First odd number at or above `lo`.
    odd_start: u64,
    odd_len: usize,
    composite: Vec<u64>,
}

impl SieveSegment {
    pub fn is_prime(&self, n: u64) -> bool {
        if n < self.lo || n >= self.hi {
            return false;
        }
        if n == 2 {
            return true;
        }
        if n % 2 == 0 {
            return false;
        }
        let i = ((n - self.odd_start) / 2) as usize;
        self.composite[i >> 6] & (1 << (i & 63)) == 0
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        let two = (self.lo <= 2 && self.hi > 2).then_some(2);
        two.into_iter().chain((0..self.odd_len).filter_map(move |i| {
            (self.composite[i >> 6] & (1 << (i & 63)) == 0).then(|| self.odd_start + 2 * i as u64)
        }))
    }

    pub fn count(&self) -> u64 {
        self.primes().count() as u64
    }
}

fn check_range(lo: u64, hi: u64) -> Result<()> {
    if lo < 1 || hi <= lo {
        return Err(Error::Domain(format!("sieve range [{lo}, {hi}) is empty or starts below 1")));
    }
    if hi > SIEVE_HI_MAX {
        return Err(Error::Capacity { requested: hi, cap: SIEVE_HI_MAX });
    }
    if hi - lo > SIEVE_WIDTH_MAX {
        return Err(Error::Capacity { requested: hi - lo, cap: SIEVE_WIDTH_MAX });
    }
    Ok(())
}

/// Odd-block layout of `[lo, hi)`: first odd, count of odds.
fn odd_layout(lo: u64, hi: u64) -> (u64, usize) {
    let start = lo | 1;
    let len = if hi > start { (hi - start).div_ceil(2) as usize } else { 0 };
    (start, len)
}

/// Run `f` on each segment of `[lo, hi)` in parallel and return the results
/// in segment order. `f` receives the first odd number, the count of odds
/// and the composite bitmap.
fn map_segments<T, F>(lo: u64, hi: u64, segment: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, usize, &[u64]) -> T + Sync,
{
    check_range(lo, hi)?;
    if segment == 0 || segment % 64 != 0 {
        return Err(Error::Domain(format!("segment size {segment} must be a positive multiple of 64")));
    }
    let base = small_primes(integer_sqrt(hi - 1));
    let (start, len) = odd_layout(lo, hi);
    let nseg = len.div_ceil(segment);
    Ok((0..nseg)
        .into_par_iter()
        .map(|k| {
            let s = start + 2 * (k * segment) as u64;
            let l = segment.min(len - k * segment);
            let bits = sieve_odd_block(s, l, &base);
            f(s, l, &bits)
        })
        .collect())
}

pub fn sieve_range(lo: u64, hi: u64) -> Result<SieveSegment> {
    sieve_range_with(lo, hi, DEFAULT_SEGMENT)
}

pub fn sieve_range_with(lo: u64, hi: u64, segment: usize) -> Result<SieveSegment> {
    let parts = map_segments(lo, hi, segment, |_, _, bits| bits.to_vec())?;
    let (odd_start, odd_len) = odd_layout(lo, hi);
    Ok(SieveSegment { lo, hi, odd_start, odd_len, composite: parts.concat() })
}

#[derive(Debug, Clone, Copy, Default)]
struct PartialCensus {
    count: u64,
    theta: Neumaier,
    min: Option<u64>,
    max: Option<u64>,
}

impl PartialCensus {
    fn push(&mut self, p: u64) {
        self.count += 1;
        self.theta.add((p as f64).ln());
        self.min = self.min.or(Some(p));
        self.max = Some(p);
    }

    fn merge(&mut self, o: &PartialCensus) {
        self.count += o.count;
        self.theta.add(o.theta.value());
        self.min = self.min.or(o.min);
        self.max = o.max.or(self.max);
    }
}

/// Prime count, `theta` and `psi` increments over `(x, x + h]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalCensus {
    pub x: u64,
    pub h: u64,
    pub prime_count: u64,
    pub psi_increment: f64,
    pub theta_increment: f64,
    pub min_prime: Option<u64>,
    pub max_prime: Option<u64>,
}

impl IntervalCensus {
    fn empty(x: u64) -> Self {
        Self { x, h: 0, prime_count: 0, psi_increment: 0.0, theta_increment: 0.0, min_prime: None, max_prime: None }
    }
}

/// `sum log p` over prime powers `p^k`, `k >= 2`, in `(a, b]`.
fn higher_prime_powers(a: u64, b: u64) -> f64 {
    let mut acc = Neumaier::new();
    for p in small_primes(integer_sqrt(b)) {
        let lp = (p as f64).ln();
        let mut q = p * p;
        loop {
            if q > a {
                acc.add(lp);
            }
            match q.checked_mul(p) {
                Some(n) if n <= b => q = n,
                _ => break,
            }
        }
    }
    acc.value()
}

pub fn interval_census(x: u64, h: u64) -> Result<IntervalCensus> {
    interval_census_with(x, h, DEFAULT_SEGMENT)
}

pub fn interval_census_with(x: u64, h: u64, segment: usize) -> Result<IntervalCensus> {
    if h == 0 {
        return Ok(IntervalCensus::empty(x));
    }
    let hi = x.checked_add(h).and_then(|v| v.checked_add(1)).ok_or(Error::Capacity { requested: u64::MAX, cap: SIEVE_HI_MAX })?;
    let lo = x + 1;
    let parts = map_segments(lo, hi, segment, |s, l, bits| {
        let mut pc = PartialCensus::default();
        for i in 0..l {
            if bits[i >> 6] & (1 << (i & 63)) == 0 {
                pc.push(s + 2 * i as u64);
            }
        }
        pc
    })?;
    let mut total = PartialCensus::default();
    if lo <= 2 && hi > 2 {
        total.push(2);
    }
    for p in &parts {
        total.merge(p);
    }
    let theta = total.theta.value();
    Ok(IntervalCensus {
        x,
        h,
        prime_count: total.count,
        psi_increment: theta + higher_prime_powers(x, x + h),
        theta_increment: theta,
        min_prime: total.min,
        max_prime: total.max,
    })
}

/// `psi(x) = sum_{n <= x} Lambda(n)`.
pub fn psi(x: u64) -> Result<f64> {
    if x > PSI_MAX {
        return Err(Error::Capacity { requested: x, cap: PSI_MAX });
    }
    Ok(interval_census(0, x)?.psi_increment)
}

/// `theta(x) = sum_{p <= x} log p`.
pub fn theta(x: u64) -> Result<f64> {
    if x > PSI_MAX {
        return Err(Error::Capacity { requested: x, cap: PSI_MAX });
    }
    Ok(interval_census(0, x)?.theta_increment)
}

/// `pi(x)`, counted segment by segment without storing the bitmap.
pub fn pi_count(x: u64) -> Result<u64> {
    if x < 2 {
        return Ok(0);
    }
    if x >= SIEVE_HI_MAX {
        return Err(Error::Capacity { requested: x, cap: SIEVE_HI_MAX });
    }
    let mut count = 1u64;
    let mut lo = 3u64;
    while lo <= x {
        let hi = (lo + SIEVE_WIDTH_MAX).min(x + 1);
        let parts = map_segments(lo, hi, DEFAULT_SEGMENT, |_, l, bits| {
            (0..l).filter(|&i| bits[i >> 6] & (1 << (i & 63)) == 0).count() as u64
        })?;
        count += parts.iter().sum::<u64>();
        lo = hi;
    }
    Ok(count)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    Exhaustive,
    Sampled,
}

/// Census of `[x^3, (x+1)^3)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubeCensus {
    pub root: u64,
    pub cube: u64,
    pub next_cube: u64,
    pub census: IntervalCensus,
}

impl CubeCensus {
    pub const CSV_HEADER: &'static str = "x,x3,x1_3,count,min_prime,max_prime";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<u64>| v.map(|p| p.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{}",
            self.root,
            self.cube,
            self.next_cube,
            self.census.prime_count,
            opt(self.census.min_prime),
            opt(self.census.max_prime)
        )
    }
}

pub const SAMPLED_ROOTS: [u64; 3] = [2000, 5000, 10_000];

fn cube_census(x: u64) -> Result<CubeCensus> {
    let cube = x.checked_pow(3).ok_or(Error::Capacity { requested: u64::MAX, cap: SIEVE_HI_MAX })?;
    let next = (x + 1).checked_pow(3).ok_or(Error::Capacity { requested: u64::MAX, cap: SIEVE_HI_MAX })?;
    if next > SIEVE_HI_MAX {
        return Err(Error::Capacity { requested: next, cap: SIEVE_HI_MAX });
    }
    // endpoints are cubes, so (x^3, (x+1)^3 - 1] has the same primes
    Ok(CubeCensus { root: x, cube, next_cube: next, census: interval_census(cube, next - 1 - cube)? })
}

/// Cube-interval censuses for every `x` in `[x_lo, x_hi]`, or for the
/// standard sample roots inside that range.
pub fn cube_gap_scan(x_lo: u64, x_hi: u64, mode: ScanMode) -> Result<Vec<CubeCensus>> {
    if x_lo < 1 || x_hi < x_lo {
        return Err(Error::Domain(format!("bad root range [{x_lo}, {x_hi}]")));
    }
    let roots: Vec<u64> = match mode {
        ScanMode::Exhaustive => (x_lo..=x_hi).collect(),
        ScanMode::Sampled => SAMPLED_ROOTS.iter().copied().filter(|r| (x_lo..=x_hi).contains(r)).collect(),
    };
    // small intervals in parallel, each sieved serially inside its own task
    roots.par_iter().map(|&x| cube_census(x)).collect()
}

/// Must-hold record: every cube interval of the scan holds a prime.
pub fn check_cube_scan(rows: &[CubeCensus], label: &str) -> BoundCheckRecord {
    let worst = rows.iter().min_by_key(|r| (r.census.prime_count, r.root));
    let (min_count, root) = worst.map(|r| (r.census.prime_count, r.root)).unwrap_or((0, 0));
    BoundCheckRecord::lower(
        format!("cor.cube_gap.{label}"),
        "Corollary: a prime between consecutive cubes",
        min_count as f64,
        1.0,
        0.0,
    )
    .note(format!("{} intervals; minimum count {min_count} at x = {root}", rows.len()))
    .must_hold()
}

/// Census at the short interval `(x, x + h]`, `h = ceil(3 x^(2/3))` by default,
/// with the empirical `1 - (psi(x+h) - psi(x))/h`.
#[derive(Debug, Clone, Serialize)]
pub struct ShortInterval {
    pub census: IntervalCensus,
    pub epsilon_empirical: f64,
}

pub fn default_short_h(x: u64) -> u64 {
    let mut h = (3.0 * (x as f64).powf(2.0 / 3.0)).ceil() as u64;
    // settle rounding at the boundary: smallest h with h^3 >= 27 x^2
    while h > 0 && (h - 1) as u128 * ((h - 1) as u128) * ((h - 1) as u128) >= 27 * (x as u128) * (x as u128) {
        h -= 1;
    }
    while (h as u128).pow(3) < 27 * (x as u128) * (x as u128) {
        h += 1;
    }
    h
}

pub fn short_interval_check(x: u64, h: Option<u64>) -> Result<ShortInterval> {
    let h = h.unwrap_or_else(|| default_short_h(x));
    let census = interval_census(x, h)?;
    let eps = if h == 0 { 0.0 } else { 1.0 - census.psi_increment / h as f64 };
    Ok(ShortInterval { census, epsilon_empirical: eps })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn small_ranges() {
        let s = sieve_range(8, 27).unwrap();
        assert_eq!(s.primes().collect::<Vec<_>>(), vec![11, 13, 17, 19, 23]);
        let s = sieve_range(1, 8).unwrap();
        assert_eq!(s.primes().collect::<Vec<_>>(), vec![2, 3, 5, 7]);
        assert!(sieve_range(5, 5).is_err());
        assert!(matches!(sieve_range(1, SIEVE_HI_MAX + 1), Err(Error::Capacity { .. })));
        assert!(matches!(sieve_range(10, 10 + SIEVE_WIDTH_MAX + 1), Err(Error::Capacity { .. })));
    }

    #[test]
    fn matches_trial_division() {
        for (lo, hi) in [(1u64, 10_001u64), (999_983, 1_009_984), (1_000_000_000_000, 1_000_000_002_000)] {
            let s = sieve_range_with(lo, hi, 128).unwrap();
            for n in lo..hi {
                assert_eq!(s.is_prime(n), trial_division(n), "n = {n}");
            }
        }
    }

    #[test]
    fn pi_of_million_against_plain_sieve() {
        let plain = {
            let mut c = vec![true; 1_000_001];
            c[0] = false;
            c[1] = false;
            let mut i = 2;
            while i * i <= 1_000_000 {
                if c[i] {
                    (i * i..=1_000_000).step_by(i).for_each(|j| c[j] = false);
                }
                i += 1;
            }
            c.iter().filter(|&&b| b).count() as u64
        };
        assert_eq!(plain, 78498);
        assert_eq!(pi_count(1_000_000).unwrap(), plain);
        assert_eq!(sieve_range_with(1, 1_000_001, 64 * 7).unwrap().count(), plain);
    }

    #[test]
    fn psi_values() {
        assert_eq!(psi(1).unwrap(), 0.0);
        assert!((psi(2).unwrap() - 2f64.ln()).abs() < 1e-15);
        let expect = 3.0 * 2f64.ln() + 2.0 * 3f64.ln() + 5f64.ln() + 7f64.ln();
        assert!((psi(10).unwrap() - expect).abs() < 1e-13);
        let r = psi(1_000_000).unwrap() / 1e6;
        assert!(r > 0.99 && r < 1.01);
    }

    #[test]
    fn psi_theta_identity() {
        for x in [1_000u64, 10_000, 100_000] {
            let mut rhs = Neumaier::new();
            for k in 2..64 {
                let r = (x as f64).powf(1.0 / k as f64).floor() as u64 + 1;
                let root = (1..=r).rev().find(|b| b.checked_pow(k as u32).is_some_and(|v| v <= x)).unwrap();
                if root < 2 {
                    break;
                }
                rhs.add(theta(root).unwrap());
            }
            let lhs = psi(x).unwrap() - theta(x).unwrap();
            assert!((lhs - rhs.value()).abs() < 1e-6, "x = {x}");
        }
    }

    #[test]
    fn cube_examples() {
        let rows = cube_gap_scan(2, 10, ScanMode::Exhaustive).unwrap();
        assert_eq!(rows[0].census.prime_count, 5);
        assert_eq!(rows[8].census.prime_count, 49);
        assert_eq!(pi_count(1331).unwrap() - pi_count(1000).unwrap(), 49);
        assert_eq!(rows[0].csv_row(), "2,8,27,5,11,23");
        assert!(check_cube_scan(&rows, "t").holds());
    }

    #[test]
    fn census_independent_of_segment() {
        let a = interval_census_with(1_000_000, 300_000, 64).unwrap();
        let b = interval_census_with(1_000_000, 300_000, DEFAULT_SEGMENT).unwrap();
        assert_eq!(a.prime_count, b.prime_count);
        assert_eq!(a.min_prime, b.min_prime);
        assert_eq!(a.max_prime, b.max_prime);
        assert!((a.theta_increment - b.theta_increment).abs() < 1e-9);
    }

    #[test]
    fn short_intervals() {
        let s = short_interval_check(1000, Some(300)).unwrap();
        let direct: Vec<u64> = (1001..=1300).filter(|&n| trial_division(n)).collect();
        assert_eq!(s.census.prime_count, direct.len() as u64);
        let th: f64 = direct.iter().map(|&p| (p as f64).ln()).sum();
        assert!((s.census.theta_increment - th).abs() < 1e-10);
        // prime powers p^k, k >= 2, in (1000, 1300]
        let pp: f64 = (1001..=1300u64)
            .filter_map(|n| {
                (2..=n).find(|d| n % d == 0).filter(|&p| {
                    let mut m = n;
                    while m % p == 0 {
                        m /= p;
                    }
                    m == 1 && p != n
                })
            })
            .map(|p| (p as f64).ln())
            .sum();
        assert!((s.census.psi_increment - th - pp).abs() < 1e-10);
        let z = short_interval_check(1000, Some(0)).unwrap();
        assert_eq!(z.census.prime_count, 0);
        assert_eq!(default_short_h(1000), 300);
        assert_eq!(default_short_h(1_000_000), 30_000);
        for x in [1_000_000u64, 100_000_000] {
            assert!(short_interval_check(x, None).unwrap().census.prime_count >= 1);
        }
    }
}
