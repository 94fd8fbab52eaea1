//! Critical-line zeros, zero-counting and zero-sum checks, and the truncated
//! explicit formula for `psi`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::check::BoundCheckRecord;
use crate::error::{Error, Result};
use crate::point::ComplexPoint;
use crate::primes::psi;
use crate::sum::Neumaier;
use crate::zeta::{zeta, zeta_log_derivative};

pub const T_MAX: f64 = 1000.0;
pub const IMAG_RESIDUE_MAX: f64 = 1e-9;
pub const BRACKET_WIDTH: f64 = 1e-9;
pub const DEFAULT_GRID: f64 = 0.01;
/// Allowed gap between the sign-change count and the smooth count.
pub const SMOOTH_SLACK: f64 = 2.0;
pub const PROP91_CONST: f64 = 1.483;
pub const U_ASSOCIATE: f64 = 1.155;

/// Zeta error target on the critical line; the f64 rounding floor of the
/// partial sum grows roughly linearly in `t`.
pub fn zeta_target(t: f64) -> f64 {
    1e-12 * t.max(100.0)
}

/// Bernoulli coefficients `B_{2k} / (2k (2k-1))` of the Stirling series.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// Principal branch of `log Gamma(z)` for `Re z > 0`, by upward shift to
/// `|z| >= 20` and the Stirling series.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) {
        return Err(Error::Domain(format!("ln_gamma needs Re z > 0, got {z}")));
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 20.0 {
        shift += w.ln();
        w += 1.0;
    }
    let half_ln_2pi = 0.5 * (2.0 * PI).ln();
    let mut series = (w - 0.5) * w.ln() - w + half_ln_2pi;
    let w2 = w * w;
    let mut pow = w;
    for c in STIRLING {
        series += c / pow;
        pow *= w2;
    }
    Ok(series - shift)
}

/// Riemann-Siegel theta `Im ln Gamma(1/4 + it/2) - (t/2) log pi`.
pub fn rs_theta(t: f64) -> Result<f64> {
    Ok(ln_gamma(Complex64::new(0.25, 0.5 * t))?.im - 0.5 * t * PI.ln())
}

/// `Z(t) = e^{i theta(t)} zeta(1/2 + it)` with its error bound.
pub fn hardy_z_detailed(t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0 && t <= T_MAX) {
        return Err(Error::Domain(format!("t = {t} outside (0, {T_MAX}]")));
    }
    let z = zeta(ComplexPoint::at(0.5, t), zeta_target(t))?;
    let rot = Complex64::from_polar(1.0, rs_theta(t)?) * z.value;
    // theta is accurate to a few ulps of its size
    let err = z.abs_error + z.value.norm() * 8.0 * f64::EPSILON * (1.0 + t);
    if rot.im.abs() > IMAG_RESIDUE_MAX.max(10.0 * err) {
        return Err(Error::Precision(format!("imaginary residue {:e} at t = {t}", rot.im)));
    }
    Ok((rot.re, err))
}

pub fn hardy_z(t: f64) -> Result<f64> {
    hardy_z_detailed(t).map(|v| v.0)
}

/// `(T / 2pi) log(T / 2pi e) + 7/8`.
pub fn smooth_zero_count(t: f64) -> f64 {
    let a = t / (2.0 * PI);
    a * (a.ln() - 1.0) + 0.875
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroOrdinates {
    pub gammas: Vec<f64>,
    pub bracket_widths: Vec<f64>,
    pub t_max: f64,
    pub grid_step: f64,
    pub complete_below_flag: bool,
    /// Largest `|count - smooth estimate|` over the corroboration grid.
    pub max_smooth_deviation: f64,
}

impl ZeroOrdinates {
    /// `N(T)`: number of ordinates below `T`.
    pub fn count_below(&self, t: f64) -> usize {
        self.gammas.partition_point(|&g| g < t)
    }

    fn require_complete(&self, t: f64) -> Result<()> {
        if !self.complete_below_flag {
            return Err(Error::Incomplete("sign-change count not corroborated".into()));
        }
        if t > self.t_max {
            return Err(Error::Incomplete(format!("T = {t} above t_max = {}", self.t_max)));
        }
        Ok(())
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("index,gamma,bracket_width\n");
        for (i, (g, w)) in self.gammas.iter().zip(&self.bracket_widths).enumerate() {
            s.push_str(&format!("{},{:.12},{:.3e}\n", i + 1, g, w));
        }
        s
    }
}

fn bisect_sign_change(mut a: f64, mut za: f64, mut b: f64) -> Result<(f64, f64)> {
    while b - a > BRACKET_WIDTH {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let zm = hardy_z(m)?;
        if zm == 0.0 {
            return Ok((m, 0.0));
        }
        if (zm > 0.0) == (za > 0.0) {
            a = m;
            za = zm;
        } else {
            b = m;
        }
    }
    Ok((0.5 * (a + b), b - a))
}

/// Sign changes of `Z` on the grid `k * step`, `0 < k * step <= t_max`,
/// bisected to width `1e-9`.
pub fn find_zeros(t_max: f64) -> Result<ZeroOrdinates> {
    find_zeros_with(t_max, DEFAULT_GRID)
}

pub fn find_zeros_with(t_max: f64, step: f64) -> Result<ZeroOrdinates> {
    if !(t_max > 0.0 && t_max <= T_MAX) {
        return Err(Error::Domain(format!("t_max = {t_max} outside (0, {T_MAX}]")));
    }
    if !(step > 0.0 && step <= 0.1) {
        return Err(Error::Domain(format!("grid step {step} outside (0, 0.1]")));
    }
    let n = (t_max / step + 1e-9).floor() as usize;
    let nodes: Vec<f64> = (1..=n).map(|k| k as f64 * step).chain(std::iter::once(t_max)).collect();
    let values: Vec<(f64, f64)> = nodes.par_iter().map(|&t| hardy_z_detailed(t)).collect::<Result<_>>()?;
    for (t, (z, e)) in nodes.iter().zip(&values) {
        if z.abs() <= *e {
            return Err(Error::Precision(format!("sign of Z undetermined at grid node t = {t}")));
        }
    }
    let brackets: Vec<(f64, f64, f64)> = (1..nodes.len())
        .filter(|&i| nodes[i] > nodes[i - 1] && (values[i].0 > 0.0) != (values[i - 1].0 > 0.0))
        .map(|i| (nodes[i - 1], values[i - 1].0, nodes[i]))
        .collect();
    let found: Vec<(f64, f64)> =
        brackets.par_iter().map(|&(a, za, b)| bisect_sign_change(a, za, b)).collect::<Result<_>>()?;
    let gammas: Vec<f64> = found.iter().map(|z| z.0).collect();
    let bracket_widths = found.iter().map(|z| z.1).collect();
    let mut zeros = ZeroOrdinates {
        gammas,
        bracket_widths,
        t_max,
        grid_step: step,
        complete_below_flag: false,
        max_smooth_deviation: 0.0,
    };
    // corroborate at every integer T in [20, t_max] and at t_max
    let mut dev: f64 = 0.0;
    let checkpoints = (20..=t_max.floor() as u64).map(|t| t as f64).chain(std::iter::once(t_max));
    for t in checkpoints.filter(|&t| t >= 14.0) {
        dev = dev.max((zeros.count_below(t) as f64 - smooth_zero_count(t)).abs());
    }
    zeros.max_smooth_deviation = dev;
    zeros.complete_below_flag = dev <= SMOOTH_SLACK;
    Ok(zeros)
}

/// Grid check that `Z` keeps one sign on `(0, t_hi]`.
pub fn check_no_sign_change(t_hi: f64, step: f64) -> Result<BoundCheckRecord> {
    let n = (t_hi / step + 1e-9).floor() as usize;
    let vals: Vec<(f64, f64)> = (1..=n).into_par_iter().map(|k| hardy_z_detailed(k as f64 * step)).collect::<Result<_>>()?;
    let changes = vals.windows(2).filter(|w| (w[0].0 > 0.0) != (w[1].0 > 0.0)).count();
    let min_abs = vals.iter().map(|v| v.0.abs() - v.1).fold(f64::INFINITY, f64::min);
    Ok(BoundCheckRecord::upper(
        format!("sec4.no_zero_below[{t_hi}]"),
        "no zero of zeta(1/2+it) for 0 <= t <= 14",
        changes as f64,
        0.5,
        0.0,
    )
    .note(format!("grid step {step}; min |Z| - err = {min_abs:.3e}"))
    .must_hold())
}

/// `N(T) <= T log T / 2pi`.
pub fn check_nt_bound(t: f64, zeros: &ZeroOrdinates) -> Result<BoundCheckRecord> {
    if t < 6.0 {
        return Err(Error::Domain(format!("T = {t} < 6")));
    }
    zeros.require_complete(t)?;
    let n = zeros.count_below(t);
    Ok(BoundCheckRecord::upper(
        format!("prop2.1[T={t}]"),
        "Prop 2.1: N(T) <= T log T / 2pi for T >= 6",
        n as f64,
        t * t.ln() / (2.0 * PI),
        0.0,
    )
    .must_hold())
}

/// Zero-count corroboration against the smooth count at `T`.
pub fn check_smooth_count(t: f64, zeros: &ZeroOrdinates) -> BoundCheckRecord {
    let n = zeros.count_below(t) as f64;
    BoundCheckRecord::upper(
        format!("zeros.smooth_count[T={t}]"),
        "|N(T) - ((T/2pi) log(T/2pi e) + 7/8)| <= 2",
        (n - smooth_zero_count(t)).abs(),
        SMOOTH_SLACK,
        1e-12,
    )
    .note(format!("N = {n}; corroboration, not a theorem"))
}

pub fn prop91_bound(t: f64) -> f64 {
    0.25 * (t * t + 4.0).ln() + PROP91_CONST
}

fn partial_note(zeros: &ZeroOrdinates) -> String {
    format!("partial sum over {} zeros below {}; holds (partial)", zeros.gammas.len(), zeros.t_max)
}

/// Partial sum over computed zeros and their conjugates of `1/(4 + (t - gamma)^2)`.
pub fn check_prop91(t: f64, zeros: &ZeroOrdinates) -> Result<BoundCheckRecord> {
    if t < 0.0 {
        return Err(Error::Domain(format!("t = {t} < 0")));
    }
    let s: Neumaier = zeros.gammas.iter().map(|&g| 1.0 / (4.0 + (t - g).powi(2)) + 1.0 / (4.0 + (t + g).powi(2))).sum();
    let s = s.value();
    Ok(BoundCheckRecord::upper(
        format!("prop9.1[t={t}]"),
        "Prop 9.1: sum 1/(4+(t-gamma)^2) <= (1/4) log(t^2+4) + 1.483",
        s,
        prop91_bound(t),
        1e-14 * s.max(1.0) * zeros.gammas.len() as f64,
    )
    .note(partial_note(zeros))
    .must_hold())
}

/// Parts (a) and (b): count of `|t - gamma| <= u`, and the partial sum of
/// `(t - gamma)^-2` over `|t - gamma| > u`.
pub fn check_prop92(t: f64, u: f64, zeros: &ZeroOrdinates) -> Result<(BoundCheckRecord, BoundCheckRecord)> {
    if !(u > 0.0) || t < 0.0 {
        return Err(Error::Domain(format!("need t >= 0, u > 0; got t = {t}, u = {u}")));
    }
    let ords = zeros.gammas.iter().flat_map(|&g| [g, -g]);
    let near = ords.clone().filter(|g| (t - g).abs() <= u).count();
    let far: Neumaier = ords.filter(|g| (t - g).abs() > u).map(|g| (t - g).powi(-2)).sum();
    let base = prop91_bound(t);
    let a = BoundCheckRecord::upper(
        format!("prop9.2a[t={t},u={u}]"),
        "Prop 9.2(a): #{|t-gamma| <= u} < (4+u^2)((1/4) log(t^2+4) + 1.483)",
        near as f64,
        (4.0 + u * u) * base,
        0.0,
    )
    .note(partial_note(zeros))
    .must_hold();
    let far = far.value();
    let b = BoundCheckRecord::upper(
        format!("prop9.2b[t={t},u={u}]"),
        "Prop 9.2(b): sum_{|t-gamma|>u} (t-gamma)^-2 <= (1+4/u^2)((1/4) log(t^2+4) + 1.483)",
        far,
        (1.0 + 4.0 / (u * u)) * base,
        1e-14 * far.max(1.0) * zeros.gammas.len() as f64,
    )
    .note(partial_note(zeros))
    .must_hold();
    Ok((a, b))
}

/// Midpoint of the widest gap among `T-u, gammas in the window, T+u`;
/// ties go to the lowest gap.
pub fn associate_tu(t: f64, u: f64, zeros: &ZeroOrdinates) -> Result<f64> {
    if !(u > 0.0 && t - u > 0.0) {
        return Err(Error::Domain(format!("need T - u > 0, u > 0; got T = {t}, u = {u}")));
    }
    zeros.require_complete(t + u)?;
    let (lo, hi) = (t - u, t + u);
    let inside = zeros.gammas.iter().copied().filter(|&g| g >= lo && g <= hi);
    let pts: Vec<f64> = std::iter::once(lo).chain(inside).chain(std::iter::once(hi)).collect();
    let mut best = (pts[1] - pts[0], 0usize);
    for j in 1..pts.len() - 1 {
        let g = pts[j + 1] - pts[j];
        if g > best.0 {
            best = (g, j);
        }
    }
    Ok(0.5 * (pts[best.1] + pts[best.1 + 1]))
}

#[derive(Debug, Clone, Serialize)]
pub struct ExplicitFormulaResidual {
    pub x: f64,
    pub t: f64,
    pub psi: f64,
    pub zero_sum: f64,
    pub residual: f64,
    pub zeros_used: usize,
    pub warning: Option<String>,
}

/// Distance from `x` to the nearest prime power, if within `tol`.
fn near_prime_power(x: f64, tol: f64) -> Option<u64> {
    let n = x.round();
    if (x - n).abs() > tol || n < 2.0 {
        return None;
    }
    let n = n as u64;
    let p = (2..=n).find(|d| n % d == 0)?;
    let mut m = n;
    while m % p == 0 {
        m /= p;
    }
    (m == 1).then_some(n)
}

/// `|psi(x) - (x - sum_{gamma <= T} 2 Re(x^rho / rho) - log 2pi - (1/2) log(1 - x^-2))|`
/// with `rho = 1/2 + i gamma`.
pub fn explicit_formula_residual(x: f64, t: f64, zeros: &ZeroOrdinates) -> Result<ExplicitFormulaResidual> {
    if !(10.0..=1e6).contains(&x) {
        return Err(Error::Domain(format!("x = {x} outside [10, 1e6]")));
    }
    if t > zeros.t_max {
        return Err(Error::Incomplete(format!("T = {t} above t_max = {}", zeros.t_max)));
    }
    let warning = near_prime_power(x, 1e-6).map(|n| format!("x within 1e-6 of prime power {n}"));
    let lx = x.ln();
    let used: Vec<f64> = zeros.gammas.iter().copied().take_while(|&g| g <= t).collect();
    let sum: Neumaier = used
        .iter()
        .map(|&g| {
            let rho = Complex64::new(0.5, g);
            2.0 * ((rho * lx).exp() / rho).re
        })
        .sum();
    let psi_x = psi(x.floor() as u64)?;
    let main = x - sum.value() - (2.0 * PI).ln() - 0.5 * (-x.powi(-2)).ln_1p();
    Ok(ExplicitFormulaResidual {
        x,
        t,
        psi: psi_x,
        zero_sum: sum.value(),
        residual: (psi_x - main).abs(),
        zeros_used: used.len(),
        warning,
    })
}

/// The 20 half-integer sample points `500.5 + 225 k` in `[500, 5000]`.
pub fn explicit_formula_samples() -> Vec<f64> {
    (0..20).map(|k| 500.5 + 225.0 * k as f64).collect()
}

pub const EXPLICIT_T: [f64; 4] = [50.0, 100.0, 200.0, 500.0];

/// Mean residual over the sample at each `T`, and the records for strict
/// decrease and the single-point scale `r(1000.5, 500) <= 2`.
pub fn check_explicit_formula(zeros: &ZeroOrdinates) -> Result<(Vec<(f64, f64)>, Vec<BoundCheckRecord>)> {
    let xs = explicit_formula_samples();
    let mut means = Vec::new();
    for &t in &EXPLICIT_T {
        let rs: Vec<f64> =
            xs.par_iter().map(|&x| explicit_formula_residual(x, t, zeros).map(|r| r.residual)).collect::<Result<_>>()?;
        means.push((t, rs.iter().sum::<f64>() / rs.len() as f64));
    }
    let mut recs: Vec<BoundCheckRecord> = means
        .windows(2)
        .map(|w| {
            BoundCheckRecord::upper(
                format!("lemma9.1.mean_residual[T={}->{}]", w[0].0, w[1].0),
                "truncated explicit formula: mean residual decreases with T",
                w[1].1,
                w[0].1,
                1e-9 * w[0].1.max(1.0),
            )
            .note("20 half-integer x in [500, 5000]")
            .must_hold()
        })
        .collect();
    let r = explicit_formula_residual(1000.5, 500.0, zeros)?;
    recs.push(
        BoundCheckRecord::upper(
            "lemma9.1.residual_scale[x=1000.5,T=500]",
            "truncated explicit formula: r(1000.5, 500) <= 2",
            r.residual,
            2.0,
            1e-9,
        )
        .must_hold(),
    );
    // the stated error term at desk scale, both printed variants
    for (label, c) in [("sec9", [5.26, 33.488, 3.0]), ("sec2", [10.52, 66.976, 6.0])] {
        let (x, t) = (1000.5f64, 500.0f64);
        let (lx, lt) = (x.ln(), t.ln());
        let e = c[0] * x * lx * lx / t + c[1] * x * lt * lt / (t * lx) + c[2] * lt * lt / x;
        recs.push(
            BoundCheckRecord::upper(
                format!("lemma9.1.E_bound.{label}[x=1000.5,T=500]"),
                "Lemma 9.1: |E(x)| bound, outside its hypothesis T >= exp(exp(18))",
                r.residual,
                e,
                1e-9,
            )
            .note(format!("constants {:?}", c))
            .diagnostic(),
        );
    }
    Ok((means, recs))
}

/// `|zeta'/zeta(-1 + it)|` against `2.999 log t + 10.241` for `t > 12` and
/// `19.172` for `0 <= t <= 12`. Diagnostic: the stated regime is `T > exp(exp(18))`.
pub fn check_prop94_left_line(ts: &[f64]) -> Result<Vec<BoundCheckRecord>> {
    ts.par_iter()
        .map(|&t| {
            let d = zeta_log_derivative(Complex64::new(-1.0, t))?;
            let (bound, which) =
                if t > 12.0 { (2.999 * t.ln() + 10.241, "(b)") } else { (19.172, "(c)") };
            Ok(BoundCheckRecord::upper(
                format!("prop9.4{which}[t={t}]"),
                "Prop 9.4: |zeta'/zeta(-1+it)| bound",
                d.value.norm(),
                bound,
                d.abs_error,
            )
            .diagnostic())
        })
        .collect()
}

/// Consistency of the ordinates: `|zeta(1/2 + i gamma)| <= 1e-6` for each.
pub fn check_zero_moduli(zeros: &ZeroOrdinates) -> Result<BoundCheckRecord> {
    let worst = zeros
        .gammas
        .par_iter()
        .map(|&g| zeta(ComplexPoint::at(0.5, g), zeta_target(g)).map(|z| (z.value.norm(), z.abs_error)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold((0.0f64, 0.0f64), |a, b| if b.0 > a.0 { b } else { a });
    Ok(BoundCheckRecord::upper("zeros.modulus", "|zeta(1/2 + i gamma)| <= 1e-6 at each ordinate", worst.0, 1e-6, worst.1)
        .note(format!("{} ordinates", zeros.gammas.len()))
        .must_hold())
}
