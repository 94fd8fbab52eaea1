//! Subcommand bodies. Each produces a [`Section`]; `all` concatenates them.

use std::collections::BTreeMap;
use std::f64::consts::E;
use std::time::Instant;

use clap::Subcommand;
use cubegap_core::analytic::{
    check_convexity, check_eq74, check_h_mean_square, check_j_integrals, check_lemma52, check_lemma53, check_lemma54,
    h_mean_square, KernelParams,
};
use cubegap_core::arith::ArithmeticTables;
use cubegap_core::check::BoundCheckRecord;
use cubegap_core::constants::{build_ledger, gap_threshold_report, suboptimize, ConstantLedger, Factor};
use cubegap_core::dirichlet::{
    check_d2_tail_chain, check_nu_bounded_by_d, check_tail_oracle, check_va_series_identity, check_w_vanishes_at_zero,
    scan_lemma32, scan_lemma33, t_grid,
};
use cubegap_core::divisor::{
    check_divisor_sum_bounds, check_elementary_inequalities, check_lemma63, check_prop61, double_sum_tail, tail_d2,
};
use cubegap_core::primes::{check_cube_scan, cube_gap_scan, short_interval_check, CubeCensus, ScanMode};
use cubegap_core::zeros::{
    associate_tu, check_explicit_formula, check_no_sign_change, check_nt_bound, check_prop91, check_prop92,
    check_prop94_left_line, check_smooth_count, check_zero_moduli, find_zeros_with, ZeroOrdinates, U_ASSOCIATE,
};
use cubegap_core::zeta::{check_strip_bound, partial_sum_remainder, scan_critical_line};
use cubegap_core::{ComplexPoint, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Config;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Constant ledger, parameter sub-optimization and gap thresholds.
    Constants,
    /// Mollifier, divisor-sum and mean-square checks.
    Bounds,
    /// Critical-line and strip bounds for zeta on a grid.
    Zeta,
    /// Zero list and zero-counting checks.
    Zeros,
    /// Primes between consecutive cubes.
    Gaps,
    /// Truncated explicit formula for psi.
    ExplicitFormula,
    /// Every section above.
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Bounds => "bounds",
            Command::Zeta => "zeta",
            Command::Zeros => "zeros",
            Command::Gaps => "gaps",
            Command::ExplicitFormula => "explicit-formula",
            Command::All => "all",
        }
    }
}

pub const DEFAULT_BOUNDS_T_MAX: f64 = 100.0;
pub const DEFAULT_BOUNDS_STEP: f64 = 0.5;
pub const DEFAULT_ZETA_T_MAX: f64 = 1000.0;
pub const DEFAULT_ZETA_STEP: f64 = 0.01;
pub const DEFAULT_ZEROS_T_MAX: f64 = 500.0;
pub const DEFAULT_ZEROS_STEP: f64 = 0.01;
pub const DEFAULT_GAPS_X_MAX: u64 = 1000;
pub const TAIL_ORACLE_N: u64 = 100_000_000;
pub const TABLE_LIMIT: usize = 1_000_000;
/// Exact part of the diagnostic log-ratio tail; the rest is majorized.
pub const LEMMA63_CUTOFF: usize = 20_000;

#[derive(Debug, Default)]
pub struct Section {
    pub records: Vec<BoundCheckRecord>,
    pub ledger: Option<ConstantLedger>,
    pub tables: BTreeMap<String, Value>,
    pub timings: BTreeMap<String, f64>,
    pub csv: Option<String>,
}

impl Section {
    fn timed<T>(&mut self, stage: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let v = f()?;
        self.timings.insert(stage.to_string(), start.elapsed().as_secs_f64());
        Ok(v)
    }

    fn table(&mut self, key: &str, v: impl Serialize) {
        self.tables.insert(key.to_string(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    fn merge(&mut self, other: Section) {
        self.records.extend(other.records);
        if other.ledger.is_some() {
            self.ledger = other.ledger;
        }
        self.tables.extend(other.tables);
        self.timings.extend(other.timings);
    }
}

/// Shared state across sections of one run.
#[derive(Default)]
pub struct Context {
    tables: Option<ArithmeticTables>,
    zeros: Option<ZeroOrdinates>,
}

impl Context {
    fn tables(&mut self, limit: usize) -> Result<&ArithmeticTables> {
        if self.tables.as_ref().is_none_or(|t| t.limit() < limit) {
            self.tables = Some(ArithmeticTables::build(limit)?);
        }
        Ok(self.tables.as_ref().expect("just built"))
    }

    fn zeros(&mut self, t_max: f64, step: f64) -> Result<&ZeroOrdinates> {
        let fits = self.zeros.as_ref().is_some_and(|z| z.t_max >= t_max && z.grid_step == step);
        if !fits {
            self.zeros = Some(find_zeros_with(t_max, step)?);
        }
        Ok(self.zeros.as_ref().expect("just built"))
    }
}

pub fn run(cmd: Command, cfg: &Config) -> Result<Section> {
    let mut ctx = Context::default();
    match cmd {
        Command::Constants => constants(cfg),
        Command::Bounds => bounds(cfg, &mut ctx),
        Command::Zeta => zeta(cfg),
        Command::Zeros => zeros(cfg, &mut ctx),
        Command::Gaps => gaps(cfg, &[cfg.mode.into()]),
        Command::ExplicitFormula => explicit_formula(cfg, &mut ctx),
        Command::All => {
            let mut all = Section::default();
            all.merge(constants(cfg)?);
            all.merge(bounds(cfg, &mut ctx)?);
            all.merge(zeta(cfg)?);
            all.merge(zeros(cfg, &mut ctx)?);
            all.merge(gaps(cfg, &[ScanMode::Exhaustive, ScanMode::Sampled])?);
            all.merge(explicit_formula(cfg, &mut ctx)?);
            Ok(all)
        }
    }
}

fn constants(_cfg: &Config) -> Result<Section> {
    let mut sec = Section::default();
    let (ledger, recs) = sec.timed("constants.ledger", || build_ledger(16, 0.5))?;
    sec.records.extend(recs);
    let sub = sec.timed("constants.suboptimize", || {
        [(Factor::Nu, 0.05, 3.0), (Factor::Kappa, 0.2, 10.0), (Factor::Omega, 0.2, 10.0)]
            .into_iter()
            .map(|(f, lo, hi)| suboptimize(f, lo, hi))
            .collect::<Result<Vec<_>>>()
    })?;
    sec.table("suboptimize", &sub);
    let gap = sec.timed("constants.gap_threshold", gap_threshold_report)?;
    sec.records.extend(gap.records.iter().cloned());
    sec.table("gap_threshold", &gap);
    let mut w = csv::Writer::from_writer(Vec::new());
    let _ = w.write_record(["name", "computed", "stated", "rel_deviation", "status"]);
    for e in &ledger.entries {
        let opt = |v: Option<f64>| v.map(crate::report::fmt_sig).unwrap_or_default();
        let status = serde_json::to_value(e.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        let _ = w.write_record([
            e.name.clone(),
            crate::report::fmt_sig(e.computed),
            opt(e.stated_in_paper),
            opt(e.rel_deviation),
            status,
        ]);
    }
    sec.csv = w.into_inner().ok().and_then(|b| String::from_utf8(b).ok());
    sec.ledger = Some(ledger);
    Ok(sec)
}

fn bounds(cfg: &Config, ctx: &mut Context) -> Result<Section> {
    let mut sec = Section::default();
    let t_max = cfg.t_max.unwrap_or(DEFAULT_BOUNDS_T_MAX).min(200.0);
    let step = cfg.grid_step.unwrap_or(DEFAULT_BOUNDS_STEP);
    let limit = cfg.limit;
    let a_values: Vec<usize> = (16..=limit).step_by(16).collect();
    let ts = t_grid(t_max, step);
    let first_zero = ctx.zeros(20.0, DEFAULT_ZEROS_STEP)?.gammas.first().copied();
    let tables = ctx.tables(limit.max(TABLE_LIMIT))?;

    let scan = sec.timed("bounds.lemma32", || scan_lemma32(&a_values, &ts, tables))?;
    sec.records.extend([scan.mean_bound, scan.half_bound, scan.w_lower]);
    let oracle = sec.timed("bounds.tail_oracle", || check_tail_oracle(&[16, 100, 1000], TAIL_ORACLE_N, 1e-6, tables))?;
    sec.records.extend(oracle);
    sec.records.push(check_d2_tail_chain(16, tables)?);
    let (u, w) = sec.timed("bounds.lemma33", || {
        scan_lemma33(&[16, 64, 256], &[0.25, 0.5, 1.0, 2.0], &[3.297, 10.0, 50.0, 100.0], tables)
    })?;
    sec.records.extend([u, w]);
    for t in [0.0, 25.0] {
        sec.records.push(check_va_series_identity(16, ComplexPoint::at(2.0, t), 100_000, tables)?);
    }
    for a in [16, 256] {
        sec.records.push(check_nu_bounded_by_d(a, 100_000, tables)?);
    }
    if let Some(g) = first_zero {
        sec.records.push(check_w_vanishes_at_zero(g, 16, tables)?);
    }

    let divisor = sec.timed("bounds.divisor", || {
        let mut r = check_divisor_sum_bounds(100_000, tables)?;
        r.push(tail_d2(1000, 0.5, 200_000, tables)?.record);
        r.push(double_sum_tail(1000, 0.5, 200_000, tables)?.record);
        r.push(check_lemma63(1000, 0.5, LEMMA63_CUTOFF, tables)?.record);
        r.extend(check_prop61(2000, tables)?);
        r.extend(check_elementary_inequalities(1000));
        Ok(r)
    })?;
    sec.records.extend(divisor);

    let tol = cfg.tolerance;
    let analytic = sec.timed("bounds.analytic", || {
        let p = KernelParams::new(16, E)?;
        let kt: Vec<f64> = (0..=30).map(f64::from).collect();
        let mut r = check_lemma54(p, &[0.5, 0.75, 1.0, 1.5, 2.0], &kt, tables)?;
        r.extend(check_j_integrals()?);
        for (a, t) in [(16, 10.0), (64, 50.0), (256, 100.0)] {
            r.push(check_eq74(t, a, tables)?);
        }
        r.push(check_lemma52(50.0, 16, tables)?);
        r.push(check_lemma53(0.5, 50.0, 16, tables)?);
        let h_tol = tol.max(1e-6);
        for sigma in [0.5, 2.0] {
            r.extend(check_h_mean_square(&h_mean_square(sigma, p, tables, h_tol)?));
        }
        r.extend(check_convexity(p, 0.5, 1.5, &[1.0], tables, h_tol)?);
        Ok(r)
    })?;
    sec.records.extend(analytic);
    sec.table("bounds.grid", json!({ "A_max": limit, "A_count": a_values.len(), "t_max": t_max, "t_step": step }));
    Ok(sec)
}

fn zeta(cfg: &Config) -> Result<Section> {
    let mut sec = Section::default();
    let t_max = cfg.t_max.unwrap_or(DEFAULT_ZETA_T_MAX);
    let step = cfg.grid_step.unwrap_or(DEFAULT_ZETA_STEP);
    let grid = sec.timed("zeta.critical_line", || scan_critical_line(t_max, step, 1e-9))?;
    sec.records.push(grid);
    for sigma in [0.25, 0.5, 1.0, 2.0] {
        for t in [3.297, 10.0, 100.0, 1000.0] {
            sec.records.push(check_strip_bound(sigma, t)?);
        }
    }
    for (sigma, t) in [(0.5, 10.0), (1.0, 20.0), (2.0, 30.0)] {
        sec.records.push(partial_sum_remainder(ComplexPoint::at(sigma, t), (t * t) as u64)?.record);
    }
    Ok(sec)
}

fn zeros(cfg: &Config, ctx: &mut Context) -> Result<Section> {
    let mut sec = Section::default();
    let t_max = cfg.t_max.unwrap_or(DEFAULT_ZEROS_T_MAX).min(1000.0);
    let step = cfg.grid_step.unwrap_or(DEFAULT_ZEROS_STEP).min(0.1);
    let start = Instant::now();
    let zs = ctx.zeros(t_max, step)?.clone();
    sec.timings.insert("zeros.find".into(), start.elapsed().as_secs_f64());
    sec.records.push(sec_timed_no_sign_change(&mut sec.timings)?);
    for t in [6.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0].into_iter().filter(|&t| t <= zs.t_max) {
        if zs.complete_below_flag {
            sec.records.push(check_nt_bound(t, &zs)?);
        }
        if t >= 20.0 {
            sec.records.push(check_smooth_count(t, &zs));
        }
    }
    sec.records.push(check_zero_moduli(&zs)?);
    for t in [0.0, 10.0, 14.1347, 50.0, 100.0] {
        sec.records.push(check_prop91(t, &zs)?);
        let (a, b) = check_prop92(t, U_ASSOCIATE, &zs)?;
        sec.records.extend([a, b]);
    }
    let left: Vec<f64> = (0..=6).map(|k| 2.0 * k as f64).chain((1..=10).map(|k| 10.0 * k as f64 + 10.0)).collect();
    let left_line = sec.timed("zeros.prop94", || check_prop94_left_line(&left))?;
    sec.records.extend(left_line);
    let mut assoc = Vec::new();
    for t in [14.0, 50.0, 100.0, 200.0, 400.0] {
        if zs.complete_below_flag && t + U_ASSOCIATE <= zs.t_max {
            assoc.push(json!({ "T": t, "u": U_ASSOCIATE, "T_u": associate_tu(t, U_ASSOCIATE, &zs)? }));
        }
    }
    sec.table("zeros.associates", assoc);
    sec.table(
        "zeros.summary",
        json!({
            "count": zs.gammas.len(),
            "t_max": zs.t_max,
            "grid_step": zs.grid_step,
            "complete_below_flag": zs.complete_below_flag,
            "max_smooth_deviation": zs.max_smooth_deviation,
            "first": zs.gammas.iter().take(10).collect::<Vec<_>>(),
            "certificate": "sign-change count corroborated by the smooth count within 2; not a Turing-method proof",
        }),
    );
    sec.csv = Some(zs.csv());
    Ok(sec)
}

fn sec_timed_no_sign_change(timings: &mut BTreeMap<String, f64>) -> Result<BoundCheckRecord> {
    let start = Instant::now();
    let r = check_no_sign_change(14.0, 0.01)?;
    timings.insert("zeros.no_sign_change".into(), start.elapsed().as_secs_f64());
    Ok(r)
}

fn gaps(cfg: &Config, modes: &[ScanMode]) -> Result<Section> {
    let mut sec = Section::default();
    let mut rows_out: Vec<CubeCensus> = Vec::new();
    for &mode in modes {
        let (label, x_hi) = match mode {
            ScanMode::Exhaustive => ("exhaustive", cfg.x_max.unwrap_or(DEFAULT_GAPS_X_MAX)),
            ScanMode::Sampled => ("sampled", cfg.x_max.unwrap_or(10_000).max(10_000)),
        };
        let rows = sec.timed(&format!("gaps.{label}"), || cube_gap_scan(2, x_hi, mode))?;
        sec.records.push(check_cube_scan(&rows, label));
        let worst = rows.iter().min_by_key(|r| (r.census.prime_count, r.root));
        sec.table(
            &format!("gaps.{label}"),
            json!({
                "roots": rows.len(),
                "x_hi": x_hi,
                "min_count": worst.map(|r| r.census.prime_count),
                "argmin": worst.map(|r| r.root),
                "rows": if mode == ScanMode::Sampled { serde_json::to_value(&rows).unwrap_or(Value::Null) } else { Value::Null },
            }),
        );
        rows_out.extend(rows);
    }
    let shorts = sec.timed("gaps.short_intervals", || {
        [1_000_000u64, 100_000_000, 10_000_000_000].into_iter().map(|x| short_interval_check(x, None)).collect::<Result<Vec<_>>>()
    })?;
    for s in &shorts {
        sec.records.push(
            BoundCheckRecord::lower(
                format!("thm3.short_interval[x={}]", s.census.x),
                "Theorem 3 at desk scale: a prime in (x, x + 3x^(2/3)]",
                s.census.prime_count as f64,
                1.0,
                0.0,
            )
            .note(format!("empirical epsilon = {:.6}; the theorem's hypothesis x >= exp(exp(45)) is out of reach", s.epsilon_empirical)),
        );
    }
    sec.table("gaps.short_intervals", &shorts);
    let mut csv = String::from(CubeCensus::CSV_HEADER);
    csv.push('\n');
    for r in &rows_out {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    sec.csv = Some(csv);
    Ok(sec)
}

fn explicit_formula(_cfg: &Config, ctx: &mut Context) -> Result<Section> {
    let mut sec = Section::default();
    let start = Instant::now();
    let zs = ctx.zeros(DEFAULT_ZEROS_T_MAX, DEFAULT_ZEROS_STEP)?.clone();
    sec.timings.insert("explicit.zeros".into(), start.elapsed().as_secs_f64());
    let (means, recs) = sec.timed("explicit.residuals", || check_explicit_formula(&zs))?;
    sec.records.extend(recs);
    sec.table(
        "explicit.mean_residuals",
        means.iter().map(|(t, m)| json!({ "T": t, "mean_residual": m })).collect::<Vec<_>>(),
    );
    Ok(sec)
}
