//! The mollifier `U_A(s) = sum_{n <= A} mu(n) n^-s` and the derived
//! functions `V_A = zeta U_A - 1` and `W_A = 1 - V_A^2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arith::ArithmeticTables;
use crate::check::{summarize, BoundCheckRecord};
use crate::divisor;
use crate::error::{Error, Result};
use crate::point::{ComplexPoint, EvaluatedValue};
use crate::sum::Neumaier;
use crate::zeta::{self, partial_sum_rounding, B1};

/// `zeta(2)^2 = pi^4 / 36`.
pub const ZETA2_SQUARED: f64 = PI * PI * PI * PI / 36.0;

/// Constant of `|V_A(2+it)|^2 <= 7.9 / A`.
pub const VA_MEAN_CONST: f64 = 7.9;
/// The proof chain's intermediate `sum_{n > A} d(n)/n^2 < 2.8 / A`.
pub const D2_TAIL_CHAIN_CONST: f64 = 2.8;

fn term(s: Complex64, n: usize) -> Complex64 {
    let ln = (n as f64).ln();
    let m = (-s.re * ln).exp();
    let (sn, cs) = (s.im * ln).sin_cos();
    Complex64::new(m * cs, -m * sn)
}

/// `U_A(s)`; exact finite sum, rounding error bounded.
pub fn u_a(s: ComplexPoint, a: usize, tables: &ArithmeticTables) -> Result<EvaluatedValue> {
    if a == 0 {
        return Err(Error::Domain("A must be >= 1".into()));
    }
    tables.require(a)?;
    let s = s.to_complex();
    let mut re = Neumaier::new();
    let mut im = Neumaier::new();
    for n in 1..=a {
        let mu = tables.mobius(n);
        if mu != 0 {
            let z = term(s, n) * mu as f64;
            re.add(z.re);
            im.add(z.im);
        }
    }
    Ok(EvaluatedValue {
        value: Complex64::new(re.value(), im.value()),
        abs_error: partial_sum_rounding(s, a as f64),
    })
}

/// `U_A(s)` for every `A = 1..=a_max`, as running sums.
pub fn u_a_prefix(s: ComplexPoint, a_max: usize, tables: &ArithmeticTables) -> Result<Vec<Complex64>> {
    tables.require(a_max)?;
    let s = s.to_complex();
    let mut out = Vec::with_capacity(a_max);
    let mut re = Neumaier::new();
    let mut im = Neumaier::new();
    for n in 1..=a_max {
        let mu = tables.mobius(n);
        if mu != 0 {
            let z = term(s, n) * mu as f64;
            re.add(z.re);
            im.add(z.im);
        }
        out.push(Complex64::new(re.value(), im.value()));
    }
    Ok(out)
}

fn combine_v(zeta: EvaluatedValue, u: EvaluatedValue) -> EvaluatedValue {
    let value = zeta.value * u.value - 1.0;
    let abs_error = zeta.abs_error * u.value.norm()
        + zeta.value.norm() * u.abs_error
        + zeta.abs_error * u.abs_error
        + 4.0 * f64::EPSILON * (zeta.value.norm() * u.value.norm() + 1.0);
    EvaluatedValue { value, abs_error }
}

fn combine_w(v: EvaluatedValue) -> EvaluatedValue {
    let value = 1.0 - v.value * v.value;
    let abs_error = 2.0 * v.value.norm() * v.abs_error
        + v.abs_error * v.abs_error
        + 4.0 * f64::EPSILON * (v.value.norm_sqr() + 1.0);
    EvaluatedValue { value, abs_error }
}

/// `V_A(s) = zeta(s) U_A(s) - 1` with propagated error.
pub fn v_a(s: ComplexPoint, a: usize, tables: &ArithmeticTables, zeta_target: f64) -> Result<EvaluatedValue> {
    let u = u_a(s, a, tables)?;
    let z = zeta::zeta(s, zeta_target)?;
    Ok(combine_v(z, u))
}

/// `W_A(s) = 1 - V_A(s)^2` with propagated error.
pub fn w_a(s: ComplexPoint, a: usize, tables: &ArithmeticTables, zeta_target: f64) -> Result<EvaluatedValue> {
    v_a(s, a, tables, zeta_target).map(combine_w)
}

/// Coefficients `nu(n) = sum_{m <= A, m | n} mu(m)` of `V_A = sum_{n > A} nu(n) n^-s`.
#[derive(Debug, Clone)]
pub struct MollifierCoefficients {
    pub a: usize,
    pub n_trunc: usize,
    /// `nu[n]` for `0 <= n <= n_trunc`; entries `n <= A` are zero except `nu[1] = 1`.
    nu: Vec<i32>,
}

impl MollifierCoefficients {
    pub fn nu(&self, n: usize) -> i32 {
        self.nu[n]
    }

    /// Iterator over `(n, nu(n))` for `A < n <= n_trunc`.
    pub fn tail(&self) -> impl Iterator<Item = (usize, i32)> + '_ {
        (self.a + 1..=self.n_trunc).map(move |n| (n, self.nu[n]))
    }
}

/// Sweep `mu(m)` over the multiples of each `m <= A`.
pub fn nu_coefficients(a: usize, n_trunc: usize, tables: &ArithmeticTables) -> Result<MollifierCoefficients> {
    if a == 0 || n_trunc < a {
        return Err(Error::Domain(format!("need 1 <= A <= N_trunc, got A = {a}, N = {n_trunc}")));
    }
    tables.require(n_trunc)?;
    let mut nu = vec![0i32; n_trunc + 1];
    for m in 1..=a {
        let mu = tables.mobius(m) as i32;
        if mu == 0 {
            continue;
        }
        let mut k = m;
        while k <= n_trunc {
            nu[k] += mu;
            k += m;
        }
    }
    if nu[1] != 1 {
        return Err(Error::Precision("nu(1) != 1".into()));
    }
    if let Some(n) = (2..=a).find(|&n| nu[n] != 0) {
        return Err(Error::Precision(format!("Möbius cancellation failed at n = {n}")));
    }
    Ok(MollifierCoefficients { a, n_trunc, nu })
}

/// `sum_{n > N} d(n) n^-sigma = zeta(sigma)^2 - sum_{n <= N} d(n) n^-sigma`, `sigma > 1`.
///
/// Returns the tail and its numeric error.
pub fn divisor_dirichlet_tail(sigma: f64, n: usize, tables: &ArithmeticTables) -> Result<(f64, f64)> {
    if sigma <= 1.0 {
        return Err(Error::Domain(format!("divisor series diverges at sigma = {sigma}")));
    }
    tables.require(n)?;
    let (full, full_err) = if sigma == 2.0 {
        (ZETA2_SQUARED, 4.0 * f64::EPSILON * ZETA2_SQUARED)
    } else {
        let z = zeta::zeta(ComplexPoint::at(sigma, 0.0), 1e-12)?;
        let v = z.value.re;
        (v * v, 2.0 * v.abs() * z.abs_error + 4.0 * f64::EPSILON * v * v)
    };
    // summed smallest-first
    let head: Neumaier = (1..=n)
        .rev()
        .map(|k| tables.divisor_count(k) as f64 * (k as f64).powf(-sigma))
        .sum();
    let head = head.value();
    let err = full_err + 4.0 * f64::EPSILON * (full + head) * (1.0 + sigma * (n as f64).ln());
    Ok((full - head, err))
}

/// Exact tail `sum_{n > A} d(n)/n^2` through `zeta(2)^2`.
pub fn exact_d2_tail(a: usize, tables: &ArithmeticTables) -> Result<(f64, f64)> {
    divisor_dirichlet_tail(2.0, a, tables)
}

/// Record the proof-chain intermediate `sum_{n > A} d(n)/n^2 < 2.8 / A`.
pub fn check_d2_tail_chain(a: usize, tables: &ArithmeticTables) -> Result<BoundCheckRecord> {
    let (tail, err) = exact_d2_tail(a, tables)?;
    Ok(BoundCheckRecord::upper(
        format!("lemma3.2.proof_chain_2.8[A={a}]"),
        "Lemma 3.2 proof: sum_{n>A} d(n)/n^2 < 2.8/A",
        tail,
        D2_TAIL_CHAIN_CONST / a as f64,
        err,
    )
    .note("intermediate step of the displayed proof; exact tail via zeta(2)^2"))
}

/// Exact tails `zeta(2)^2 - sum_{n<=A} d(n)/n^2` against direct summation
/// of `d(n)/n^2` over `(A, n_direct]`, agreeing to `tol`.
pub fn check_tail_oracle(
    a_values: &[usize],
    n_direct: u64,
    tol: f64,
    tables: &ArithmeticTables,
) -> Result<Vec<BoundCheckRecord>> {
    let a_max = a_values.iter().copied().max().unwrap_or(1);
    tables.require(a_max)?;
    if (a_max as u64) >= n_direct {
        return Err(Error::Domain(format!("direct range ({a_max}, {n_direct}] is empty")));
    }
    let far = divisor::direct_d_over_n2(a_max as u64, n_direct, 1 << 20);
    a_values
        .iter()
        .map(|&a| {
            let near: Neumaier =
                (a + 1..=a_max).rev().map(|n| tables.divisor_count(n) as f64 / (n as f64 * n as f64)).sum();
            let direct = far + near.value();
            let (exact, _) = exact_d2_tail(a, tables)?;
            Ok(BoundCheckRecord::agreement(
                format!("lemma3.2.exact_tail[A={a}]"),
                "Lemma 3.2 proof: sum_{n>A} d(n)/n^2, closed form vs direct summation",
                exact,
                direct,
                tol,
            )
            .note(format!("direct summation over (A, {n_direct}]"))
            .must_hold())
        })
        .collect()
}

/// Compare `zeta U_A - 1` against the truncated series `sum_{A<n<=N} nu(n) n^-s`.
pub fn check_va_series_identity(
    a: usize,
    s: ComplexPoint,
    n_trunc: usize,
    tables: &ArithmeticTables,
) -> Result<BoundCheckRecord> {
    if s.sigma < 1.5 {
        return Err(Error::Domain(format!("series identity check needs sigma >= 1.5, got {}", s.sigma)));
    }
    let coeffs = nu_coefficients(a, n_trunc, tables)?;
    let v = v_a(s, a, tables, 1e-12)?;
    let sc = s.to_complex();
    let mut re = Neumaier::new();
    let mut im = Neumaier::new();
    for (n, nu) in coeffs.tail() {
        if nu != 0 {
            let z = term(sc, n) * nu as f64;
            re.add(z.re);
            im.add(z.im);
        }
    }
    let series = Complex64::new(re.value(), im.value());
    // every |nu(n)| <= d(n) <= 2 sqrt(n), so the series rounding is bounded by that of
    // sum 2 n^(1/2 - sigma)
    let series_err = 2.0 * partial_sum_rounding(Complex64::new(sc.re - 0.5, sc.im), n_trunc as f64);
    let (tail, tail_err) = divisor_dirichlet_tail(s.sigma, n_trunc, tables)?;
    let diff = (v.value - series).norm();
    Ok(BoundCheckRecord::upper(
        format!("lemma3.1.series[A={a},s={}+{}i,N={n_trunc}]", s.sigma, s.t),
        "Lemma 3.1: V_A(s) = sum_{n>A} nu(n)/n^s",
        diff,
        tail,
        v.abs_error + series_err + tail_err,
    )
    .note("rhs is the exact majorant sum_{n>N} d(n) n^-sigma")
    .must_hold())
}

/// Exhaustive check of `|nu(n)| <= d(n)` for `n <= n_max`.
pub fn check_nu_bounded_by_d(a: usize, n_max: usize, tables: &ArithmeticTables) -> Result<BoundCheckRecord> {
    let coeffs = nu_coefficients(a, n_max, tables)?;
    let worst = (1..=n_max)
        .map(|n| (n, coeffs.nu(n).abs() as f64 - tables.divisor_count(n) as f64))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap_or((1, -1.0));
    let n = worst.0;
    Ok(BoundCheckRecord::upper(
        format!("lemma3.1.nu_le_d[A={a},n<={n_max}]"),
        "Lemma 3.1: |nu(n)| <= d(n)",
        coeffs.nu(n).abs() as f64,
        tables.divisor_count(n) as f64 + 0.5,
        0.0,
    )
    .note(format!("exhaustive; tightest n = {n}; integer comparison with 0.5 slack"))
    .must_hold())
}

/// Sample grid `0, step, ..., t_max`.
pub fn t_grid(t_max: f64, step: f64) -> Vec<f64> {
    let count = (t_max / step + 1e-9).floor() as usize;
    (0..=count).map(|k| k as f64 * step).collect()
}

/// Records for the statements about `V_A(2+it)` and `W_A(2+it)`.
#[derive(Debug, Clone)]
pub struct Lemma32Scan {
    /// `|V_A(2+it)|^2 <= 7.9 / A`.
    pub mean_bound: BoundCheckRecord,
    /// `|V_A(2+it)|^2 < 1/2`.
    pub half_bound: BoundCheckRecord,
    /// `|W_A(2+it)| > 1/2`.
    pub w_lower: BoundCheckRecord,
}

/// Scan `A` in `a_values` and `t` in `t_values` on the line `sigma = 2`.
pub fn scan_lemma32(a_values: &[usize], t_values: &[f64], tables: &ArithmeticTables) -> Result<Lemma32Scan> {
    let a_max = a_values.iter().copied().max().unwrap_or(1);
    tables.require(a_max)?;
    type Node = (BoundCheckRecord, BoundCheckRecord, BoundCheckRecord);
    let per_t: Vec<Vec<Node>> = t_values
        .par_iter()
        .map(|&t| {
            let s = ComplexPoint::new(2.0, t)?;
            let z = zeta::zeta(s, 1e-12)?;
            let prefix = u_a_prefix(s, a_max, tables)?;
            let mut nodes = Vec::with_capacity(a_values.len());
            for &a in a_values {
                let u = EvaluatedValue {
                    value: prefix[a - 1],
                    abs_error: partial_sum_rounding(s.to_complex(), a as f64),
                };
                let v = combine_v(z, u);
                let w = combine_w(v);
                let v2 = v.value.norm_sqr();
                let v2_err = 2.0 * v.value.norm() * v.abs_error + v.abs_error * v.abs_error;
                let label = format!("A = {a}, t = {t}");
                nodes.push((
                    BoundCheckRecord::upper("", "", v2, VA_MEAN_CONST / a as f64, v2_err).note(&label),
                    BoundCheckRecord::upper("", "", v2, 0.5, v2_err).note(&label),
                    BoundCheckRecord::lower("", "", w.value.norm(), 0.5, w.abs_error).note(&label),
                ));
            }
            Ok(nodes)
        })
        .collect::<Result<_>>()?;
    let flat: Vec<Node> = per_t.into_iter().flatten().collect();
    let mean: Vec<_> = flat.iter().map(|n| n.0.clone()).collect();
    let half: Vec<_> = flat.iter().map(|n| n.1.clone()).collect();
    let wl: Vec<_> = flat.iter().map(|n| n.2.clone()).collect();
    let sampled = format!("sampled: {} values of A, {} values of t", a_values.len(), t_values.len());
    Ok(Lemma32Scan {
        mean_bound: summarize(
            "lemma3.2.va_mean_bound",
            "Lemma 3.2: |V_A(2+it)|^2 <= 7.9/A",
            &mean,
        )
        .note(&sampled)
        .must_hold(),
        half_bound: summarize("lemma3.2.va_below_half", "Lemma 3.2: |V_A(2+it)|^2 < 1/2 for A >= 16", &half)
            .note(&sampled),
        w_lower: summarize("lemma3.2.wa_above_half", "Lemma 3.2: |W_A(2+it)| > 1/2 for A >= 16", &wl)
            .note(&sampled),
    })
}

/// `(16/9) A^{3/4} t^{3/2} + b1 A^{3/4} t^{1/2}`, the factor of the `W_A` bound.
pub fn w_bound_factor(a: usize, t: f64) -> f64 {
    let a34 = (a as f64).powf(0.75);
    16.0 / 9.0 * a34 * t.powf(1.5) + B1 * a34 * t.sqrt()
}

/// Sampled checks of `|U_A(s)| <= (4/3) A^{3/4}` and the `W_A` growth bound.
pub fn scan_lemma33(
    a_values: &[usize],
    sigma_values: &[f64],
    t_values: &[f64],
    tables: &ArithmeticTables,
) -> Result<(BoundCheckRecord, BoundCheckRecord)> {
    let mut points = Vec::new();
    for &a in a_values {
        for &sigma in sigma_values {
            for &t in t_values {
                if sigma < 0.25 || t < zeta::STRIP_T_MIN {
                    return Err(Error::Domain(format!("Lemma 3.3 region excludes ({sigma}, {t})")));
                }
                points.push((a, sigma, t));
            }
        }
    }
    let nodes: Vec<(BoundCheckRecord, BoundCheckRecord)> = points
        .par_iter()
        .map(|&(a, sigma, t)| {
            let s = ComplexPoint::new(sigma, t)?;
            let u = u_a(s, a, tables)?;
            let z = zeta::zeta(s, 1e-10)?;
            let w = combine_w(combine_v(z, u));
            let f = w_bound_factor(a, t);
            let label = format!("A = {a}, s = {sigma} + {t}i");
            Ok((
                BoundCheckRecord::upper("", "", u.value.norm(), 4.0 / 3.0 * (a as f64).powf(0.75), u.abs_error)
                    .note(&label),
                BoundCheckRecord::upper("", "", w.value.norm(), f * (f + 2.0), w.abs_error).note(&label),
            ))
        })
        .collect::<Result<_>>()?;
    let (us, ws): (Vec<_>, Vec<_>) = nodes.into_iter().unzip();
    Ok((
        summarize("eq3.2.ua_bound", "eq. (3.2): |U_A(s)| <= (4/3) A^(3/4)", &us).note("sampled"),
        summarize("lemma3.3.wa_bound", "Lemma 3.3: |W_A(s)| <= (...)((...) + 2)", &ws).note("sampled"),
    ))
}

/// `|W_A(1/2 + i gamma)|` at a computed zero ordinate, compared against a
/// vanishing tolerance of `1e-6`.
pub fn check_w_vanishes_at_zero(gamma: f64, a: usize, tables: &ArithmeticTables) -> Result<BoundCheckRecord> {
    let w = w_a(ComplexPoint::new(0.5, gamma)?, a, tables, 1e-12)?;
    Ok(BoundCheckRecord::upper(
        format!("lemma3.1.wa_zero[A={a},gamma={gamma:.9}]"),
        "Lemma 3.1: every non-trivial zero of zeta is a zero of W_A",
        w.value.norm(),
        1e-6,
        w.abs_error,
    )
    .note("ordinate known to bracket width 1e-9"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tables() -> ArithmeticTables {
        ArithmeticTables::build(100_000).unwrap()
    }

    #[test]
    fn u_a_examples() {
        let t = tables();
        let u = u_a(ComplexPoint::at(0.7, 13.0), 1, &t).unwrap();
        assert_eq!(u.value, Complex64::new(1.0, 0.0));
        let u = u_a(ComplexPoint::at(0.0, 0.0), 3, &t).unwrap();
        assert!((u.value.re + 1.0).abs() < 1e-15);
        let u = u_a(ComplexPoint::at(2.0, 0.0), 16, &t).unwrap();
        assert!(u.value.norm() <= 4.0 / 3.0 * 16f64.powf(0.75));
        assert!(u_a(ComplexPoint::at(2.0, 0.0), 200_000, &t).is_err());
    }

    #[test]
    fn v_and_w_examples() {
        let t = tables();
        let s = ComplexPoint::at(0.8, 7.0);
        let v = v_a(s, 1, &t, 1e-12).unwrap();
        let z = zeta::zeta(s, 1e-12).unwrap();
        assert!((v.value - (z.value - 1.0)).norm() < 1e-11);
        let v = v_a(ComplexPoint::at(2.0, 0.0), 16, &t, 1e-12).unwrap();
        assert!(v.value.norm_sqr() <= 7.9 / 16.0);
        let v = v_a(ComplexPoint::at(2.0, 50.0), 64, &t, 1e-12).unwrap();
        assert!(v.value.norm_sqr() <= 7.9 / 64.0);
        let w = w_a(ComplexPoint::at(2.0, 5.0), 16, &t, 1e-12).unwrap();
        assert!(w.value.norm() > 0.5);
    }

    #[test]
    fn w_is_one_where_v_vanishes() {
        let v = EvaluatedValue { value: Complex64::new(0.0, 0.0), abs_error: 0.0 };
        assert_eq!(combine_w(v).value, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn w_vanishes_at_first_zero() {
        let t = tables();
        let r = check_w_vanishes_at_zero(14.134_725_141_734_694, 16, &t).unwrap();
        assert!(r.holds(), "{r:?}");
    }

    #[test]
    fn nu_examples() {
        let t = tables();
        let c = nu_coefficients(4, 10, &t).unwrap();
        assert_eq!(c.nu(6), -1);
        assert_eq!(c.nu(5), 1);
        for a in [16, 100] {
            assert!(check_nu_bounded_by_d(a, 100_000, &t).unwrap().holds());
        }
    }

    #[test]
    fn series_identity_examples() {
        let t = tables();
        let r = check_va_series_identity(16, ComplexPoint::at(2.0, 0.0), 100_000, &t).unwrap();
        assert!(r.holds() && r.lhs < 1e-6, "{r:?}");
        let r = check_va_series_identity(16, ComplexPoint::at(2.0, 25.0), 100_000, &t).unwrap();
        assert!(r.holds(), "{r:?}");
        let r = check_va_series_identity(100, ComplexPoint::at(3.0, 0.0), 100_000, &t).unwrap();
        assert!(r.holds() && r.lhs < 1e-9, "{r:?}");
        assert!(check_va_series_identity(16, ComplexPoint::at(1.2, 0.0), 1000, &t).is_err());
    }

    #[test]
    fn proof_chain_fails_at_16() {
        let t = tables();
        let r = check_d2_tail_chain(16, &t).unwrap();
        assert!(r.fails());
        assert!((r.lhs - 0.296_874_284_520_650_4).abs() < 1e-12);
    }

    #[test]
    fn mollifier_small_scan() {
        let t = tables();
        let scan = scan_lemma32(&[16, 32, 64], &t_grid(20.0, 0.5), &t).unwrap();
        assert!(scan.mean_bound.holds());
        assert!(scan.half_bound.holds());
        assert!(scan.w_lower.holds());
    }

    #[test]
    fn mollifier_growth_samples() {
        let t = tables();
        let (u, w) = scan_lemma33(&[16, 64], &[0.25, 0.5, 1.0, 2.0], &[3.297, 10.0, 50.0], &t).unwrap();
        assert!(u.holds() && w.holds());
    }
}
