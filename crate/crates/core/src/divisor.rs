//! Exact divisor sums and the tail estimates built on them.
//!
//! Infinite tails are split at a cutoff `M`: the finite part is summed
//! exactly from the tables and the remainder is bounded by partial summation
//! against the elementary majorants
//!
//! * `sum_{n <= x} d(n)   <= x (1 + ln x)`,
//! * `sum_{n <= x} d(n)^2 <= x (1 + ln x)^3` (from `d(n)^2 <= d_4(n)`),
//!
//! so a reported `lhs + truncation_residual` is a rigorous upper bound.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{divisor_counts_range, ArithmeticTables};
use crate::check::BoundCheckRecord;
use crate::error::{Error, Result};
use crate::sum::Neumaier;

const EPS: f64 = f64::EPSILON;

/// Finite part plus rigorous residual for one of the divisor tail lemmas.
#[derive(Debug, Clone, Serialize)]
pub struct TailEstimate {
    pub n: usize,
    pub delta: f64,
    pub cutoff: usize,
    /// Lower bound for the left side (exact finite part).
    pub lhs_exact_or_bounded: f64,
    pub rhs_formula: f64,
    /// The true left side lies in `[lhs, lhs + truncation_residual]`.
    pub truncation_residual: f64,
    pub record: BoundCheckRecord,
}

pub fn sum_d(x: usize, tables: &ArithmeticTables) -> Result<u64> {
    tables.require(x)?;
    Ok((1..=x).map(|n| tables.divisor_count(n) as u64).sum())
}

pub fn sum_d_squared(x: usize, tables: &ArithmeticTables) -> Result<u64> {
    tables.require(x)?;
    Ok((1..=x).map(|n| (tables.divisor_count(n) as u64).pow(2)).sum())
}

pub fn sum_d_over_sqrt(x: usize, tables: &ArithmeticTables) -> Result<f64> {
    tables.require(x)?;
    let s: Neumaier = (1..=x).map(|n| tables.divisor_count(n) as f64 / (n as f64).sqrt()).sum();
    Ok(s.value())
}

/// `sum_{m <= x} sum_{n < m} d(m) d(n) / (m - n)`.
pub fn sum_d_pairs_over_gap(x: usize, tables: &ArithmeticTables) -> Result<f64> {
    tables.require(x)?;
    let rows: Vec<f64> = (2..=x)
        .into_par_iter()
        .map(|m| {
            let inner: Neumaier = (1..m).map(|n| tables.divisor_count(n) as f64 / (m - n) as f64).sum();
            tables.divisor_count(m) as f64 * inner.value()
        })
        .collect();
    Ok(rows.iter().copied().sum::<Neumaier>().value())
}

/// The quoted explicit bounds for the three divisor sums, at `x`.
pub fn check_divisor_sum_bounds(x: usize, tables: &ArithmeticTables) -> Result<Vec<BoundCheckRecord>> {
    if x < 2 {
        return Err(Error::Domain("divisor sum bounds need x >= 2".into()));
    }
    let xf = x as f64;
    let l = xf.ln();
    let r = xf.sqrt();
    let sd = sum_d(x, tables)? as f64;
    let sd2 = sum_d_squared(x, tables)? as f64;
    let sds = sum_d_over_sqrt(x, tables)?;
    let sds_err = 4.0 * EPS * sds;
    let d2_full = 0.102 * xf * l.powi(3) + 1.676 * xf * l * l + 8.564 * xf * l + 23.652 * xf
        + 1.334 * r * l.powi(3)
        - 2.845 * r * l * l
        - 4.280 * r * l
        - 8.501 * r
        + 1.334 * l.powi(3)
        - 0.845 * l * l
        + 2.874 * l
        - 0.111;
    let tag = format!("x = {x}");
    Ok(vec![
        BoundCheckRecord::upper(
            format!("div.sum_d[x={x}]"),
            "sum d(n) <= x log x + 0.155x + 4 sqrt(x)",
            sd,
            xf * l + 0.155 * xf + 4.0 * r,
            0.0,
        )
        .note(&tag),
        BoundCheckRecord::upper(format!("div.sum_d_1.001[x={x}]"), "sum d(n) <= 1.001 x log x", sd, 1.001 * xf * l, 0.0)
            .note(&tag)
            .diagnostic(),
        BoundCheckRecord::upper(format!("div.sum_d2_full[x={x}]"), "sum d(n)^2 <= 0.102 x log^3 x + ...", sd2, d2_full, 0.0)
            .note(&tag),
        BoundCheckRecord::upper(
            format!("div.sum_d2_0.103[x={x}]"),
            "sum d(n)^2 <= 0.103 x log^3 x",
            sd2,
            0.103 * xf * l.powi(3),
            0.0,
        )
        .note(&tag)
        .note("absorbed form needs log x of order 10^3")
        .diagnostic(),
        BoundCheckRecord::upper(
            format!("div.sum_d_sqrt_full[x={x}]"),
            "sum d(n)/sqrt(n) <= 2 sqrt(x) log x - 1.691 sqrt(x) + 2 log x + 5.846",
            sds,
            2.0 * r * l - 1.691 * r + 2.0 * l + 5.846,
            sds_err,
        )
        .note(&tag),
        BoundCheckRecord::upper(
            format!("div.sum_d_sqrt_2.001[x={x}]"),
            "sum d(n)/sqrt(n) <= 2.001 sqrt(x) log x",
            sds,
            2.001 * r * l,
            sds_err,
        )
        .note(&tag)
        .diagnostic(),
    ])
}

/// `sum_{n <= x} d(n)/n^2` over `(lo, hi]` by segmented divisor counting;
/// no table needed.
pub fn direct_d_over_n2(lo: u64, hi: u64, segment: u64) -> f64 {
    let segment = segment.max(1);
    let starts: Vec<u64> = (lo + 1..=hi).step_by(segment as usize).collect();
    let parts: Vec<f64> = starts
        .par_iter()
        .map(|&a| {
            let b = (a + segment).min(hi + 1);
            let counts = divisor_counts_range(a, b);
            let mut s = Neumaier::new();
            for (i, &d) in counts.iter().enumerate().rev() {
                let n = (a + i as u64) as f64;
                s.add(d as f64 / (n * n));
            }
            s.value()
        })
        .collect();
    // segments are in increasing n; add the small late ones first
    parts.iter().rev().copied().sum::<Neumaier>().value()
}

/// `int_M^inf (1 + ln y)^k y^(-1-a) dy` in closed form.
pub fn log_power_tail_integral(m: f64, k: u32, a: f64) -> f64 {
    assert!(a > 0.0 && m >= 1.0);
    let l = m.ln();
    let mut total = 0.0;
    let mut falling = 1.0;
    for j in 0..=k {
        if j > 0 {
            falling *= (k - j + 1) as f64;
        }
        total += falling * (1.0 + l).powi((k - j) as i32) / a.powi(j as i32 + 1);
    }
    (-a * l).exp() * total
}

/// Rigorous bound for `sum_{n > M} a(n) n^-p` given `sum_{n <= y} a(n) <= y (1 + ln y)^k`
/// and the exact prefix `sum_{n <= M} a(n)`.
fn partial_summation_tail(m: usize, p: f64, k: u32, prefix_at_m: f64) -> f64 {
    let mf = m as f64;
    let bound = p * log_power_tail_integral(mf, k, p - 1.0) - prefix_at_m * mf.powf(-p);
    bound.max(0.0)
}

struct Partial {
    finite: f64,
    residual: f64,
    err: f64,
}

/// `sum_{N < n} w(n) n^-p` with `w = d` (`k = 1`) or `w = d^2` (`k = 3`), cut at `M`.
fn divisor_power_tail(n: usize, m: usize, p: f64, squared: bool, tables: &ArithmeticTables) -> Partial {
    let weight = |j: usize| {
        let d = tables.divisor_count(j) as f64;
        if squared {
            d * d
        } else {
            d
        }
    };
    let finite: Neumaier = (n + 1..=m).rev().map(|j| weight(j) * (j as f64).powf(-p)).sum();
    let prefix: f64 = (1..=m).map(weight).sum();
    let finite = finite.value();
    Partial {
        finite,
        residual: partial_summation_tail(m, p, if squared { 3 } else { 1 }, prefix),
        err: 16.0 * EPS * finite,
    }
}

fn check_cutoff(n: usize, delta: f64, cutoff: usize, tables: &ArithmeticTables) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("N = {n} must be >= 2")));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::Domain(format!("delta = {delta} must be positive")));
    }
    if cutoff <= n {
        return Err(Error::Domain(format!("cutoff {cutoff} must exceed N = {n}")));
    }
    tables.require(cutoff)
}

const HYPOTHESIS_NOTE: &str = "hypothesis log log N >= 18 unreachable; diagnostic";

/// `sum_{n > N} d(n)^2 / n^(2 + 2 delta)` against its stated majorant.
pub fn tail_d2(n: usize, delta: f64, cutoff: usize, tables: &ArithmeticTables) -> Result<TailEstimate> {
    check_cutoff(n, delta, cutoff, tables)?;
    let l = (n as f64).ln();
    let part = divisor_power_tail(n, cutoff, 2.0 + 2.0 * delta, true, tables);
    let rhs = 0.206 / (n as f64).powf(1.0 + 2.0 * delta) * (l.powi(3) + 3.0 * l * l + 6.0 * l + 6.0);
    let record = BoundCheckRecord::upper(
        format!("lemma6.1[N={n},delta={delta}]"),
        "Lemma 6.1: sum_{n>N} d^2(n)/n^(2+2delta) <= 0.206/N^(1+2delta)(...)",
        part.finite,
        rhs,
        part.err,
    )
    .with_residual(part.residual)
    .note(format!("cutoff M = {cutoff}"))
    .note(HYPOTHESIS_NOTE)
    .diagnostic();
    Ok(TailEstimate {
        n,
        delta,
        cutoff,
        lhs_exact_or_bounded: part.finite,
        rhs_formula: rhs,
        truncation_residual: part.residual,
        record,
    })
}

/// `sum_{N < m < n} d(m) d(n) / (mn)^(1 + delta)`, evaluated exactly as
/// `(S^2 - Q) / 2` from the single tails `S` and `Q`.
pub fn double_sum_tail(n: usize, delta: f64, cutoff: usize, tables: &ArithmeticTables) -> Result<TailEstimate> {
    check_cutoff(n, delta, cutoff, tables)?;
    let s = divisor_power_tail(n, cutoff, 1.0 + delta, false, tables);
    let q = divisor_power_tail(n, cutoff, 2.0 + 2.0 * delta, true, tables);
    let lower = 0.5 * (s.finite * s.finite - q.finite - q.residual);
    let upper = 0.5 * ((s.finite + s.residual).powi(2) - q.finite);
    let lower = lower.max(0.0);
    let err = s.finite * s.err + q.err + 4.0 * EPS * s.finite * s.finite;
    let l = (n as f64).ln();
    let rhs = 1.003 / (n as f64).powf(2.0 * delta)
        * (l * l / delta.powi(2) + 2.0 * l / delta.powi(3) + 1.0 / delta.powi(4));
    let record = BoundCheckRecord::upper(
        format!("lemma6.2[N={n},delta={delta}]"),
        "Lemma 6.2: sum_{N<m<n} d(m)d(n)/(mn)^(1+delta) <= 1.003/N^(2delta)(...)",
        lower,
        rhs,
        err,
    )
    .with_residual(upper - lower)
    .note(format!("cutoff M = {cutoff}; (S^2 - Q)/2 with both tails bounded"))
    .note(HYPOTHESIS_NOTE)
    .diagnostic();
    Ok(TailEstimate {
        n,
        delta,
        cutoff,
        lhs_exact_or_bounded: lower,
        rhs_formula: rhs,
        truncation_residual: upper - lower,
        record,
    })
}

/// `1 / log(m/n)` without cancellation for `n < m`.
fn inv_log_ratio(m: usize, n: usize) -> f64 {
    1.0 / ((m - n) as f64 / n as f64).ln_1p()
}

/// `sum_{m <= x} sum_{n < m} d(m) d(n) / ((mn)^(1/2) log(m/n))`, exactly.
pub fn log_ratio_double_sum(x: usize, tables: &ArithmeticTables) -> Result<f64> {
    if x < 2 {
        return Err(Error::Domain("x must be >= 2".into()));
    }
    if x > 100_000 {
        return Err(Error::Capacity { requested: x as u64, cap: 100_000 });
    }
    tables.require(x)?;
    let inv_sqrt: Vec<f64> = (0..=x).map(|n| if n == 0 { 0.0 } else { 1.0 / (n as f64).sqrt() }).collect();
    let rows: Vec<f64> = (2..=x)
        .into_par_iter()
        .map(|m| {
            let inner: Neumaier = (1..m)
                .map(|n| tables.divisor_count(n) as f64 * inv_sqrt[n] * inv_log_ratio(m, n))
                .sum();
            tables.divisor_count(m) as f64 * inv_sqrt[m] * inner.value()
        })
        .collect();
    Ok(rows.iter().copied().sum::<Neumaier>().value())
}

/// The double sum against `0.066 x log^3 x + 4.005 x log^2 x`, and the
/// `d(m)d(n)/(m-n)` part against `0.066 x log^3 x`.
pub fn check_prop61(x: usize, tables: &ArithmeticTables) -> Result<Vec<BoundCheckRecord>> {
    let lhs = log_ratio_double_sum(x, tables)?;
    let gap = sum_d_pairs_over_gap(x, tables)?;
    let xf = x as f64;
    let l = xf.ln();
    let err = 1e-12 * lhs;
    Ok(vec![
        BoundCheckRecord::upper(
            format!("prop6.1[x={x}]"),
            "Prop 6.1: sum d(m)d(n)/((mn)^(1/2) log(m/n)) <= 0.066 x log^3 x + 4.005 x log^2 x",
            lhs,
            0.066 * xf * l.powi(3) + 4.005 * xf * l * l,
            err,
        )
        .note(format!("ratio lhs / (x log^3 x) = {:.6}", lhs / (xf * l.powi(3))))
        .note("hypothesis log log x >= 18 unreachable; diagnostic")
        .diagnostic(),
        BoundCheckRecord::upper(
            format!("prop6.1.gap_sum[x={x}]"),
            "Prop 6.1 proof: sum d(m)d(n)/(m-n) <= 0.066 x log^3 x",
            gap,
            0.066 * xf * l.powi(3),
            1e-12 * gap,
        )
        .note("hypothesis log log x >= 18 unreachable; diagnostic")
        .diagnostic(),
    ])
}

/// Smallest constant with `d(n) <= C n^theta` for all `n`.
pub fn divisor_power_constant(theta: f64) -> Result<f64> {
    if !(0.05..1.0).contains(&theta) {
        return Err(Error::Domain(format!("theta = {theta} outside [0.05, 1)")));
    }
    // primes p >= 2^(1/theta) contribute a factor 1
    let bound = 2f64.powf(1.0 / theta).ceil() as usize;
    let mut composite = vec![false; bound + 1];
    let mut log_c = 0.0;
    for p in 2..=bound {
        if composite[p] {
            continue;
        }
        let mut q = p * p;
        while q <= bound {
            composite[q] = true;
            q += p;
        }
        let step = theta * (p as f64).ln();
        let mut best: f64 = 0.0;
        let mut e = 1u32;
        loop {
            let v = ((e + 1) as f64).ln() - e as f64 * step;
            if v <= best && e > 1 {
                break;
            }
            best = best.max(v);
            e += 1;
        }
        log_c += best;
    }
    Ok(log_c.exp())
}

/// Majorant of the `m > M` part of the weighted log-ratio tail through `d(n) <= C n^theta`
/// and `1/log(m/n) < 1 + (mn)^(1/2)/(m - n)`.
fn lemma63_residual(m: usize, delta: f64) -> (f64, f64) {
    let mut best = (f64::INFINITY, f64::NAN);
    let candidates = [0.125 * delta, 0.25 * delta, 0.375 * delta, 0.1, 0.2, 0.3, 0.4];
    for theta in candidates {
        if !(0.05..0.5).contains(&theta) || 2.0 * theta >= delta {
            continue;
        }
        let Ok(c) = divisor_power_constant(theta) else { continue };
        let b = delta - 2.0 * theta;
        let k = 1.0 / (theta + 0.5) + 1.0;
        let l = (m as f64).ln();
        let r = c * c * (m as f64).powf(-b) * ((k + l) / b + 1.0 / (b * b));
        if r < best.0 {
            best = (r, theta);
        }
    }
    best
}

/// `sum_{N<m} m^(-1-delta) sum_{N<n<m} d(m) d(n) / ((mn)^(1/2) log(m/n))`.
pub fn check_lemma63(n: usize, delta: f64, cutoff: usize, tables: &ArithmeticTables) -> Result<TailEstimate> {
    check_cutoff(n, delta, cutoff, tables)?;
    if cutoff - n > 200_000 {
        return Err(Error::Capacity { requested: (cutoff - n) as u64, cap: 200_000 });
    }
    let weights: Vec<f64> = (0..=cutoff)
        .map(|j| if j == 0 { 0.0 } else { tables.divisor_count(j) as f64 / (j as f64).sqrt() })
        .collect();
    let rows: Vec<f64> = (n + 2..=cutoff)
        .into_par_iter()
        .map(|m| {
            let inner: Neumaier = (n + 1..m).map(|j| weights[j] * inv_log_ratio(m, j)).sum();
            weights[m] * (m as f64).powf(-1.0 - delta) * inner.value()
        })
        .collect();
    let finite = rows.iter().copied().sum::<Neumaier>().value();
    let (residual, theta) = lemma63_residual(cutoff, delta);
    let nf = n as f64;
    let l = nf.ln();
    let pref = (1.0 + delta) / nf.powf(delta);
    let rhs = 0.066 * pref * (l.powi(3) / delta + 3.0 * l * l / delta.powi(2) + 6.0 * l / delta.powi(3) + 6.0 / delta.powi(4))
        + 4.005 * pref * (l * l / delta + 2.0 * l / delta.powi(2) + 2.0 / delta.powi(3));
    let record = BoundCheckRecord::upper(
        format!("lemma6.3[N={n},delta={delta}]"),
        "Lemma 6.3: sum_{N<m} m^(-1-delta) sum_{N<n<m} d(m)d(n)/((mn)^(1/2) log(m/n)) <= ...",
        finite,
        rhs,
        1e-12 * finite,
    )
    .with_residual(residual)
    .note(format!("cutoff M = {cutoff}; residual via d(n) <= C n^theta, theta = {theta}"))
    .note(HYPOTHESIS_NOTE)
    .diagnostic();
    Ok(TailEstimate {
        n,
        delta,
        cutoff,
        lhs_exact_or_bounded: finite,
        rhs_formula: rhs,
        truncation_residual: residual,
        record,
    })
}

/// Pointwise checks of the elementary inequalities used for the log-ratio
/// sums, exhaustively over `1 <= n < m <= m_max`.
pub fn check_elementary_inequalities(m_max: usize) -> Vec<BoundCheckRecord> {
    // (worst margin, m, n) for each inequality, margins as rhs - lhs
    let worst = |f: &(dyn Fn(f64, usize, usize) -> f64 + Sync)| {
        (2..=m_max)
            .into_par_iter()
            .map(|m| {
                (1..m)
                    .map(|n| (f(m as f64 / n as f64, m, n), m, n))
                    .fold((f64::INFINITY, 0, 0), |a, b| if b.0 < a.0 { b } else { a })
            })
            .reduce(|| (f64::INFINITY, 0, 0), |a, b| if b.0 < a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) { b } else { a })
    };
    let ratio = worst(&|_, m, n| {
        let lhs = inv_log_ratio(m, n);
        let rhs = 1.0 + ((m * n) as f64).sqrt() / (m - n) as f64;
        (rhs - lhs) / rhs
    });
    let sqrt_form = worst(&|x, m, n| {
        let lg = ((m - n) as f64 / n as f64).ln_1p();
        // 1/log x < 1 + 1/(x^(1/2) log x)  <=>  log x + x^(-1/2) - 1 > 0
        lg + 1.0 / x.sqrt() - 1.0
    });
    let xlogx = worst(&|x, m, n| {
        let lg = ((m - n) as f64 / n as f64).ln_1p();
        x * lg - x + 1.0
    });
    let rec = |id: &str, r: &str, w: (f64, usize, usize), note: &str| {
        // relative margin against a unit right side; error from a few roundings
        BoundCheckRecord::lower(id, r, w.0, 0.0, 64.0 * EPS)
            .note(format!("exhaustive 1 <= n < m <= {m_max}; tightest (m, n) = ({}, {}); {note}", w.1, w.2))
            .must_hold()
    };
    vec![
        rec(
            "ineq.inv_log_ratio",
            "1/log(m/n) < 1 + (mn)^(1/2)/(m-n)",
            ratio,
            "lhs is the relative margin",
        ),
        rec("ineq.log_plus_inv_sqrt", "log x + x^(-1/2) - 1 > 0 for x > 1", sqrt_form, "x = m/n"),
        rec("ineq.x_log_x", "x log x - x + 1 > 0 for x > 1", xlogx, "x = m/n"),
    ]
}
