//! Riemann zeta evaluation by Euler–Maclaurin summation with an explicit
//! error bound, plus the pointwise zeta bounds checked against it.

use std::f64::consts::E;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::check::{summarize, BoundCheckRecord};
use crate::error::{Error, Result};
use crate::point::{ComplexPoint, EvaluatedValue};
use crate::sum::Neumaier;

/// `B_{2k} / (2k)!` for k = 1..=5.
const SCALED_BERNOULLI: [f64; 5] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
];

/// Number of Bernoulli correction terms kept (through B_8).
pub const CORRECTION_TERMS: usize = 4;

/// Default cap on the number of Dirichlet terms.
pub const DEFAULT_TERM_CAP: u64 = 10_000_000;

/// Constant of the partial-sum remainder bound.
pub const B1: f64 = 5.134;
/// Lower end of the `t` range of the partial-sum and strip bounds.
pub const STRIP_T_MIN: f64 = 3.297;

/// Critical-line bound `|zeta(1/2 + it)| <= C t^alpha log^beta(t + e) + D`.
pub const CRIT_C: f64 = 3.0;
pub const CRIT_ALPHA: f64 = 1.0 / 6.0;
pub const CRIT_BETA: f64 = 1.0;
pub const CRIT_D: f64 = 2.657;

/// The value of an Euler–Maclaurin evaluation at a fixed number of terms.
#[derive(Debug, Clone, Copy)]
pub struct EmEvaluation {
    pub value: EvaluatedValue,
    /// Dirichlet terms summed explicitly, `n < terms`.
    pub terms: u64,
    pub truncation_bound: f64,
    pub rounding_bound: f64,
}

fn truncation_bound(s: Complex64, n: f64) -> f64 {
    // first omitted term, k = CORRECTION_TERMS + 1
    let k = CORRECTION_TERMS + 1;
    let mut poch = 1.0;
    for j in 0..(2 * k - 1) {
        poch *= (s + j as f64).norm();
    }
    let first_omitted = SCALED_BERNOULLI[k - 1].abs() * poch * n.powf(1.0 - s.re - 2.0 * k as f64);
    let m = CORRECTION_TERMS as f64;
    (s + 2.0 * m + 1.0).norm() / (s.re + 2.0 * m + 1.0) * first_omitted
}

/// Upper bound for `sum_{n <= count} n^-sigma`.
fn power_sum_bound(sigma: f64, count: f64) -> f64 {
    if count < 1.0 {
        return 0.0;
    }
    if sigma <= 0.0 {
        return count * count.powf(-sigma);
    }
    if (sigma - 1.0).abs() < 1e-12 {
        1.0 + count.ln()
    } else {
        1.0 + (count.powf(1.0 - sigma) - 1.0) / (1.0 - sigma)
    }
}

/// Floating-point error bound of the partial sum `sum_{n <= count} n^-s`.
///
/// Each term `exp(-sigma ln n) (cos, -sin)(t ln n)` has a phase error of at
/// most `1.5 eps |t| ln n` and a modulus error of `eps (|sigma| ln n + 3)`;
/// compensated accumulation adds `2 eps` per unit of magnitude.
pub fn partial_sum_rounding(s: Complex64, count: f64) -> f64 {
    if count < 1.0 {
        return 0.0;
    }
    let eps = f64::EPSILON;
    let log_n = count.ln();
    eps * power_sum_bound(s.re, count) * ((1.5 * s.im.abs() + s.re.abs()) * log_n + 6.0)
}

/// Dirichlet partial sum `sum_{n <= count} n^-s`, compensated, in index order.
pub fn dirichlet_partial_sum(s: Complex64, count: u64) -> EvaluatedValue {
    let mut re = Neumaier::new();
    let mut im = Neumaier::new();
    for n in 1..=count {
        let ln = (n as f64).ln();
        let m = (-s.re * ln).exp();
        let (sn, cs) = (s.im * ln).sin_cos();
        re.add(m * cs);
        im.add(-m * sn);
    }
    EvaluatedValue {
        value: Complex64::new(re.value(), im.value()),
        abs_error: partial_sum_rounding(s, count as f64),
    }
}

fn em_error_bound(s: Complex64, terms: u64) -> (f64, f64) {
    let n = terms as f64;
    let trunc = truncation_bound(s, n);
    // tail terms have magnitude at most ~ N^{1-sigma}/|s-1| + N^{-sigma}
    let tail = n.powf(1.0 - s.re) / (s - 1.0).norm() + n.powf(-s.re);
    let round = partial_sum_rounding(s, n - 1.0) + 8.0 * f64::EPSILON * tail;
    (trunc, round)
}

/// Euler–Maclaurin evaluation of zeta at a fixed cut `terms` (>= 1).
///
/// Valid for `Re s > -9`, `s != 1`. No domain policy is applied here.
pub fn euler_maclaurin(s: Complex64, terms: u64) -> EmEvaluation {
    let terms = terms.max(1);
    let n = terms as f64;
    let head = dirichlet_partial_sum(s, terms - 1);
    let n_pow = (-s * n.ln()).exp(); // N^{-s}
    let mut value = head.value + n_pow * n / (s - 1.0) + 0.5 * n_pow;
    // Pochhammer s(s+1)...(s+2k-2) and N^{-s-2k+1}
    let mut poch = s;
    let mut pow = n_pow / n;
    for k in 1..=CORRECTION_TERMS {
        value += SCALED_BERNOULLI[k - 1] * poch * pow;
        let j = 2.0 * k as f64;
        poch *= (s + (j - 1.0)) * (s + j);
        pow /= n * n;
    }
    let (trunc, round) = em_error_bound(s, terms);
    EmEvaluation {
        value: EvaluatedValue {
            value,
            abs_error: trunc + round,
        },
        terms,
        truncation_bound: trunc,
        rounding_bound: round,
    }
}

/// Smallest cut on the search sequence whose total error bound meets the target.
fn select_terms(s: Complex64, target: f64, cap: u64) -> Result<u64> {
    let mut n = (s.im.abs().ceil() as u64).saturating_add(10);
    let mut best = f64::INFINITY;
    loop {
        let (trunc, round) = em_error_bound(s, n);
        let total = trunc + round;
        best = best.min(total);
        if total <= target {
            return Ok(n);
        }
        if trunc < round || n >= cap {
            return Err(Error::NonConvergence {
                target,
                best,
                terms: n,
            });
        }
        n = ((n as f64 * 1.25).ceil() as u64).min(cap);
    }
}

/// Zeta without the `sigma > -1` restriction (requires `sigma > -9`).
pub(crate) fn zeta_extended(s: Complex64, target: f64, cap: u64) -> Result<EmEvaluation> {
    if !(target > 0.0) {
        return Err(Error::Domain(format!("target error {target} must be positive")));
    }
    if s.re <= -9.0 {
        return Err(Error::Domain(format!("sigma = {} outside Euler-Maclaurin range", s.re)));
    }
    if s.re == 1.0 && s.im == 0.0 {
        return Err(Error::Pole);
    }
    let terms = select_terms(s, target, cap)?;
    Ok(euler_maclaurin(s, terms))
}

/// `zeta(s)` with `abs_error <= target_abs_error`, for `sigma > -1`, `s != 1`.
pub fn zeta(s: ComplexPoint, target_abs_error: f64) -> Result<EvaluatedValue> {
    zeta_detailed(s, target_abs_error, DEFAULT_TERM_CAP).map(|e| e.value)
}

/// As [`zeta`], also reporting the cut used and the split of the error bound.
pub fn zeta_detailed(s: ComplexPoint, target_abs_error: f64, term_cap: u64) -> Result<EmEvaluation> {
    if s.sigma <= -1.0 {
        return Err(Error::Domain(format!("sigma = {} <= -1", s.sigma)));
    }
    zeta_extended(s.to_complex(), target_abs_error, term_cap)
}

/// Zeta at the tightest target in `1e-12, 1e-11, ..., 1e-3` that the
/// rounding floor allows.
fn zeta_reachable(s: Complex64, cap: u64) -> Result<EmEvaluation> {
    let mut target = 1e-12;
    loop {
        match zeta_extended(s, target, cap) {
            Err(Error::NonConvergence { .. }) if target < 1e-3 => target *= 10.0,
            other => return other,
        }
    }
}

/// Logarithmic derivative `zeta'/zeta` by central differences of zeta.
///
/// Works down to `sigma > -8`. The returned error covers the difference
/// quotient's truncation (`h^2` times a Cauchy bound on the third
/// derivative over a disc of radius 1/2) and the propagated evaluation error.
pub fn zeta_log_derivative(s: Complex64) -> Result<EvaluatedValue> {
    let h = 1e-4;
    let cap = DEFAULT_TERM_CAP;
    let z0 = zeta_reachable(s, cap)?.value;
    let zp = zeta_reachable(s + h, cap)?.value;
    let zm = zeta_reachable(s - h, cap)?.value;
    let deriv = (zp.value - zm.value) / (2.0 * h);
    // |zeta'''| <= 3! max|zeta| / r^3 on |w - s| = r, r = 1/2; sample the circle
    let r = 0.5;
    let mut max_mod: f64 = 0.0;
    for k in 0..16 {
        let w = s + Complex64::from_polar(r, k as f64 * std::f64::consts::PI / 8.0);
        let z = zeta_reachable(w, cap)?.value;
        max_mod = max_mod.max(z.value.norm() + z.abs_error);
    }
    // sampled maximum is inflated by 2x to cover the circle between samples
    let third = 6.0 * 2.0 * max_mod / r.powi(3);
    let deriv_err = h * h / 6.0 * third + (zp.abs_error + zm.abs_error) / (2.0 * h);
    let ratio = deriv / z0.value;
    let zn = z0.value.norm();
    if zn <= z0.abs_error {
        return Err(Error::Singular(format!("zeta vanishes within error at {s}")));
    }
    let err = deriv_err / (zn - z0.abs_error) + deriv.norm() * z0.abs_error / (zn * (zn - z0.abs_error));
    Ok(EvaluatedValue {
        value: ratio,
        abs_error: err,
    })
}

/// Result of comparing the tail `zeta(s) - sum_{n <= t^2} n^-s` against `b1 t^{1/2}`.
#[derive(Debug, Clone)]
pub struct RemainderCheck {
    pub bound: f64,
    pub actual: f64,
    pub actual_error: f64,
    pub record: BoundCheckRecord,
}

/// The partial-sum remainder bound `b1 t^{1/2}` at `N = floor(t^2)`, with
/// the actual remainder computed through [`zeta`] as a paired diagnostic.
pub fn partial_sum_remainder(s: ComplexPoint, n: u64) -> Result<RemainderCheck> {
    if s.sigma < 0.25 || s.t < STRIP_T_MIN {
        return Err(Error::Domain(format!(
            "remainder bound needs sigma >= 1/4 and t >= {STRIP_T_MIN}, got {} + {}i",
            s.sigma, s.t
        )));
    }
    let expected = (s.t * s.t).floor() as u64;
    if n != expected {
        return Err(Error::Domain(format!("N must be floor(t^2) = {expected}, got {n}")));
    }
    let bound = B1 * s.t.sqrt();
    let z = zeta(s, 1e-9)?;
    let head = dirichlet_partial_sum(s.to_complex(), n);
    let actual = (z.value - head.value).norm();
    let err = z.abs_error + head.abs_error;
    let record = BoundCheckRecord::upper(
        format!("prop3.1.remainder[s={}+{}i]", s.sigma, s.t),
        "Prop 3.1: |B(s)| <= b1 t^(1/2), b1 = 5.134",
        actual,
        bound,
        err,
    )
    .note(format!("N = {n}"));
    Ok(RemainderCheck {
        bound,
        actual,
        actual_error: err,
        record,
    })
}

/// `3 t^{1/6} log(t + e) + 2.657`.
pub fn critical_line_bound(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("critical-line bound needs t > 0, got {t}")));
    }
    Ok(CRIT_C * t.powf(CRIT_ALPHA) * (t + E).ln().powf(CRIT_BETA) + CRIT_D)
}

/// `(4/3) t^{3/2} + b1 t^{1/2}`, valid for `sigma >= 1/4`, `t >= 3.297`.
pub fn strip_zeta_bound(sigma: f64, t: f64) -> Result<f64> {
    if sigma < 0.25 || t < STRIP_T_MIN {
        return Err(Error::Domain(format!(
            "strip bound needs sigma >= 1/4 and t >= {STRIP_T_MIN}, got ({sigma}, {t})"
        )));
    }
    Ok(4.0 / 3.0 * t.powf(1.5) + B1 * t.sqrt())
}

/// Pair the strip bound with the actual `|zeta(s)|`.
pub fn check_strip_bound(sigma: f64, t: f64) -> Result<BoundCheckRecord> {
    let bound = strip_zeta_bound(sigma, t)?;
    // the rounding floor of the partial sum grows with t
    let z = zeta(ComplexPoint::new(sigma, t)?, 1e-11 * t.max(100.0))?;
    Ok(BoundCheckRecord::upper(
        format!("eq3.3.strip[s={sigma}+{t}i]"),
        "eq. (3.3): |zeta(s)| <= (4/3) t^(3/2) + b1 t^(1/2)",
        z.value.norm(),
        bound,
        z.abs_error,
    ))
}

/// Check the critical-line bound at every node `k * step`, `0 < k * step <= t_max`.
pub fn scan_critical_line(t_max: f64, step: f64, target: f64) -> Result<BoundCheckRecord> {
    if !(step > 0.0) || !(t_max > 0.0) {
        return Err(Error::Domain("grid needs positive step and t_max".into()));
    }
    let count = (t_max / step + 1e-9).floor() as u64;
    let records: Vec<BoundCheckRecord> = (1..=count)
        .into_par_iter()
        .map(|k| {
            let t = k as f64 * step;
            let z = zeta(ComplexPoint::at(0.5, t), target)?;
            let bound = critical_line_bound(t)?;
            Ok(BoundCheckRecord::upper("", "", z.value.norm(), bound, z.abs_error)
                .note(format!("t = {t}")))
        })
        .collect::<Result<_>>()?;
    Ok(summarize(
        "lemma5.1.critical_line_grid",
        "Lemma 5.1: |zeta(1/2+it)| <= 3 t^(1/6) log(t+e) + 2.657",
        &records,
    )
    .note(format!("grid step {step} on (0, {t_max}]"))
    .must_hold())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn basel_value() {
        let z = zeta(ComplexPoint::at(2.0, 0.0), 1e-13).unwrap();
        assert!((z.value.re - PI * PI / 6.0).abs() < 1e-12);
        assert!(z.value.im.abs() < 1e-15);
        assert!(z.abs_error <= 1e-13);
    }

    #[test]
    fn zeta_at_zero() {
        let z = zeta(ComplexPoint::at(0.0, 0.0), 1e-13).unwrap();
        assert!((z.value.re + 0.5).abs() < 1e-12, "{:?}", z);
    }

    #[test]
    fn near_first_zero() {
        let z = zeta(ComplexPoint::at(0.5, 14.134725), 1e-10).unwrap();
        assert!(z.value.norm() < 1e-5);
    }

    #[test]
    fn rejects_pole_and_left_half() {
        assert_eq!(zeta(ComplexPoint::at(1.0, 0.0), 1e-10), Err(Error::Pole));
        assert!(matches!(zeta(ComplexPoint::at(-1.0, 3.0), 1e-10), Err(Error::Domain(_))));
        assert!(matches!(
            zeta(ComplexPoint::at(0.5, 10.0), 1e-300),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn known_values_off_axis() {
        // zeta(-1/2) = -0.2078862250...
        let z = zeta(ComplexPoint::at(-0.5, 0.0), 1e-11).unwrap();
        assert!((z.value.re + 0.207_886_224_977_354_6).abs() < 1e-11);
        // zeta(1/2 + 100i) = 2.6926198... - 0.0203428...i
        let z = zeta(ComplexPoint::at(0.5, 100.0), 1e-11).unwrap();
        assert!((z.value.re - 2.692_619_885_681_324_4).abs() < 1e-9, "{}", z.value);
        assert!((z.value.im + 0.020_386_029_602_598_1).abs() < 1e-9, "{}", z.value);
    }

    #[test]
    fn remainder_bound_examples() {
        let b = partial_sum_remainder(ComplexPoint::at(0.25, 10.0), 100).unwrap();
        assert!((b.bound - 16.235).abs() < 1e-3);
        let r = partial_sum_remainder(ComplexPoint::at(2.0, 3.297), 10).unwrap();
        assert!(r.record.holds());
        let r = partial_sum_remainder(ComplexPoint::at(0.5, 100.0), 10000).unwrap();
        assert!(r.record.holds(), "{:?}", r.record);
        assert!(partial_sum_remainder(ComplexPoint::at(0.2, 10.0), 100).is_err());
        assert!(partial_sum_remainder(ComplexPoint::at(0.5, 3.0), 9).is_err());
    }

    #[test]
    fn critical_line_bound_values() {
        assert!((critical_line_bound(1e-24).unwrap() - 2.657).abs() < 1e-3);
        let v = critical_line_bound(100.0).unwrap();
        let direct = 3.0 * 100f64.powf(1.0 / 6.0) * (100.0 + E).ln() + 2.657;
        assert_eq!(v, direct);
        assert!((v - 32.595).abs() < 1e-3);
        assert!(critical_line_bound(0.0).is_err());
    }

    #[test]
    fn strip_bound_values() {
        let v = strip_zeta_bound(0.5, 3.297).unwrap();
        assert!((v - 17.30).abs() < 0.01, "{v}");
        let r = check_strip_bound(2.0, 10.0).unwrap();
        assert!((r.rhs - 58.4).abs() < 0.1);
        // |zeta(2 + 10i)| = 1.2005957...
        assert!(r.holds() && (r.lhs - 1.200_595_7).abs() < 1e-6);
        assert!(check_strip_bound(0.25, 50.0).unwrap().holds());
        assert!(strip_zeta_bound(0.2, 5.0).is_err());
    }

    #[test]
    fn log_derivative_on_left_line() {
        // zeta'/zeta(-1 + 0i): zeta(-1) = -1/12, zeta'(-1) = 1/12 - log A (Glaisher)
        let d = zeta_log_derivative(Complex64::new(-1.0, 0.0)).unwrap();
        let expected = (1.0 / 12.0 - 0.248_754_477_033_784_26) / (-1.0 / 12.0);
        assert!((d.value.re - expected).abs() < 1e-6, "{} vs {}", d.value, expected);
        assert!(d.abs_error < 1e-5);
    }
}
