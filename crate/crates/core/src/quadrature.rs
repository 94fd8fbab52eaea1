//! Adaptive Gauss-Legendre quadrature on bisected panels.
//!
//! Every active panel is integrated with the 15-point rule and compared
//! against the sum over its two halves. Panels whose disagreement is within
//! their share of the tolerance are accepted; the others are split. Each
//! level is evaluated in parallel and the accepted panels are summed in
//! left-to-right order, so the result does not depend on the thread count.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sum::Neumaier;

pub const GL_POINTS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Refinement disagreement, plus integrated evaluation error and any
    /// analytic tail bound supplied by the caller.
    pub est_error: f64,
    pub nodes_used: u64,
}

/// Knobs for [`integrate_with_error`].
#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub initial_panels: usize,
    pub max_depth: u32,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            initial_panels: 8,
            max_depth: 30,
        }
    }
}

impl QuadratureOptions {
    pub fn tolerance(abs_tol: f64) -> Self {
        Self { abs_tol, rel_tol: 0.0, ..Self::default() }
    }
}

/// Nodes and weights of the 15-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre_15() -> &'static ([f64; GL_POINTS], [f64; GL_POINTS]) {
    static RULE: OnceLock<([f64; GL_POINTS], [f64; GL_POINTS])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_POINTS;
        let mut x = [0.0; GL_POINTS];
        let mut w = [0.0; GL_POINTS];
        for i in 0..n {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            x[i] = z;
            w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
        (x, w)
    })
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    depth: u32,
}

struct PanelEval {
    value: f64,
    eval_error: f64,
}

fn gl_panel<F>(f: &F, a: f64, b: f64) -> Result<PanelEval>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    let (x, w) = gauss_legendre_15();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = Neumaier::new();
    let mut e = 0.0;
    for i in 0..GL_POINTS {
        let (v, err) = f(mid + half * x[i])?;
        s.add(w[i] * v);
        e += w[i] * err;
    }
    Ok(PanelEval {
        value: half * s.value(),
        eval_error: half.abs() * e,
    })
}

/// Integrate `f` over `[a, b]`; `f` returns a value and a bound on its own error.
pub fn integrate_with_error<F>(f: F, a: f64, b: f64, opts: QuadratureOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Result<(f64, f64)> + Sync,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("integration limits must be finite, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadratureResult { value: 0.0, est_error: 0.0, nodes_used: 0 });
    }
    let len = (b - a).abs();
    let n0 = opts.initial_panels.max(1);
    let mut active: Vec<Panel> = (0..n0)
        .map(|i| Panel {
            a: a + (b - a) * i as f64 / n0 as f64,
            b: if i + 1 == n0 { b } else { a + (b - a) * (i + 1) as f64 / n0 as f64 },
            depth: 0,
        })
        .collect();
    // coarse pass fixes the relative scale
    let coarse: Vec<f64> = active
        .par_iter()
        .map(|p| gl_panel(&f, p.a, p.b).map(|e| e.value))
        .collect::<Result<_>>()?;
    let scale = coarse.iter().map(|v| v.abs()).sum::<f64>();
    let tol = opts.abs_tol.max(opts.rel_tol * scale);
    let mut nodes = (n0 * GL_POINTS) as u64;
    let mut accepted: Vec<(f64, f64, f64, f64)> = Vec::new();
    let mut exhausted = false;
    while !active.is_empty() {
        let evaluated: Vec<(Panel, f64, f64, f64)> = active
            .par_iter()
            .map(|p| {
                let whole = gl_panel(&f, p.a, p.b)?;
                let m = 0.5 * (p.a + p.b);
                let left = gl_panel(&f, p.a, m)?;
                let right = gl_panel(&f, m, p.b)?;
                let fine = left.value + right.value;
                Ok((*p, fine, (fine - whole.value).abs(), left.eval_error + right.eval_error))
            })
            .collect::<Result<_>>()?;
        nodes += (evaluated.len() * 3 * GL_POINTS) as u64;
        let mut next = Vec::new();
        for (p, fine, diff, eval_err) in evaluated {
            let share = tol * (p.b - p.a).abs() / len;
            if diff <= share || p.depth >= opts.max_depth {
                if diff > share {
                    exhausted = true;
                }
                accepted.push((p.a.min(p.b), fine, diff, eval_err));
            } else {
                let m = 0.5 * (p.a + p.b);
                next.push(Panel { a: p.a, b: m, depth: p.depth + 1 });
                next.push(Panel { a: m, b: p.b, depth: p.depth + 1 });
            }
        }
        active = next;
    }
    accepted.sort_by(|x, y| x.0.total_cmp(&y.0));
    let value = accepted.iter().map(|p| p.1).sum::<Neumaier>().value();
    let est_error = accepted.iter().map(|p| p.2 + p.3).sum::<f64>();
    if exhausted && est_error > tol {
        return Err(Error::NonConvergence { target: tol, best: est_error, terms: nodes });
    }
    Ok(QuadratureResult { value, est_error, nodes_used: nodes })
}

/// Integrate an exactly computable `f` over `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, opts: QuadratureOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64 + Sync,
{
    integrate_with_error(|x| Ok((f(x), 0.0)), a, b, opts)
}
