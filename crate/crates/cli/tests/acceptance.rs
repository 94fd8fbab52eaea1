//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use cubegap_cli::report::without_timings;
use cubegap_core::analytic::{check_eq74, check_j_integrals, j_integral, ua_mean_square, ua_mean_square_quadrature};
use cubegap_core::arith::ArithmeticTables;
use cubegap_core::check::{CheckMode, Verdict};
use cubegap_core::constants::{a1_formula, build_ledger, check_ca_corollary, suboptimize, Factor, KAPPA};
use cubegap_core::dirichlet::{check_d2_tail_chain, check_tail_oracle, scan_lemma32, t_grid};
use cubegap_core::logscale::LogScaleReal;
use cubegap_core::primes::{check_cube_scan, cube_gap_scan, ScanMode, SAMPLED_ROOTS};
use cubegap_core::zeros::{
    check_explicit_formula, check_no_sign_change, check_nt_bound, check_prop91, check_prop92, check_smooth_count,
    explicit_formula_residual, find_zeros, ZeroOrdinates, U_ASSOCIATE,
};
use cubegap_core::zeta::scan_critical_line;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, secs: u64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < secs as f64, format!("runtime {:.1} s over {secs} s", elapsed.as_secs_f64()))
}

fn tables() -> ArithmeticTables {
    ArithmeticTables::build(1_000_000).expect("tables")
}

fn mollifier_bound() -> Outcome {
    let tables = tables();
    let a: Vec<usize> = (16..=4096).step_by(16).collect();
    let ts = t_grid(100.0, 0.5);
    let start = Instant::now();
    let scan = scan_lemma32(&a, &ts, &tables).map_err(|e| e.to_string())?;
    within(start.elapsed(), 60)?;
    let r = scan.mean_bound;
    ensure(r.verdict == Verdict::Holds, format!("verdict {:?}", r.verdict))?;
    ensure(r.margin > 10.0 * r.numeric_error, "margin not above 10x error")?;
    ensure(ts.len() == 201 && a.len() == 256, "grid size")?;
    Ok(format!("{} nodes, worst margin {:.3e}, {:.1} s", a.len() * ts.len(), r.margin, start.elapsed().as_secs_f64()))
}

fn tail_oracle() -> Outcome {
    let tables = tables();
    let recs = check_tail_oracle(&[16, 100, 1000], 100_000_000, 1e-6, &tables).map_err(|e| e.to_string())?;
    for r in &recs {
        ensure(r.lhs < 1e-6 && r.verdict == Verdict::Holds, format!("{}: |diff| = {:e}", r.check_id, r.lhs))?;
    }
    let chain = check_d2_tail_chain(16, &tables).map_err(|e| e.to_string())?;
    ensure(chain.verdict == Verdict::Fails, "2.8/A chain not recorded as fails at A = 16")?;
    ensure(chain.mode != CheckMode::MustHold, "2.8/A chain must not gate")?;
    let worst = recs.iter().map(|r| r.lhs).fold(0.0, f64::max);
    Ok(format!("max |diff| {worst:.2e}; 2.8/A at 16: {:.4} vs {:.4} fails", chain.lhs, chain.rhs))
}

fn zeta_grid() -> Outcome {
    let start = Instant::now();
    let r = scan_critical_line(1000.0, 0.01, 1e-9).map_err(|e| e.to_string())?;
    within(start.elapsed(), 600)?;
    ensure(r.verdict == Verdict::Holds, format!("verdict {:?}: {}", r.verdict, r.notes))?;
    Ok(format!("100000 nodes, worst margin {:.3e}, {:.1} s", r.margin, start.elapsed().as_secs_f64()))
}

fn j_integrals() -> Outcome {
    use statrs::function::gamma::gamma;
    let j13 = j_integral(1.0 / 3.0, 0).map_err(|e| e.to_string())?.value;
    let j43 = j_integral(4.0 / 3.0, 0).map_err(|e| e.to_string())?.value;
    let (d1, d2) = ((j13 - gamma(4.0 / 3.0)).abs(), (j43 - gamma(7.0 / 3.0)).abs());
    ensure(d1 < 1e-8, format!("J(1/3,0) off by {d1:e}"))?;
    ensure(d2 < 1e-8, format!("J(4/3,0) off by {d2:e}"))?;
    let recs = check_j_integrals().map_err(|e| e.to_string())?;
    let mut verdicts = Vec::new();
    for id in ["j.third_2", "j.four_thirds_2"] {
        let r = recs.iter().find(|r| r.check_id == id).ok_or(format!("{id} missing"))?;
        ensure(r.verdict != Verdict::Indeterminate, format!("{id} indeterminate"))?;
        verdicts.push(format!("{id} {:.6} vs {} {:?}", r.lhs, r.rhs, r.verdict));
    }
    Ok(format!("gamma diffs {d1:.1e}, {d2:.1e}; {}", verdicts.join("; ")))
}

fn mean_square_oracle() -> Outcome {
    let tables = tables();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2026);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let a = rng.random_range(1..=256usize);
        let t = rng.random_range(0.0..=100.0f64);
        let closed = ua_mean_square(t, a, &tables).map_err(|e| e.to_string())?;
        let quad = ua_mean_square_quadrature(t, a, &tables, 1e-10).map_err(|e| e.to_string())?.value;
        let rel = (closed - quad).abs() / quad.abs().max(f64::MIN_POSITIVE);
        ensure(rel < 1e-6, format!("A = {a}, t = {t}: relative error {rel:e}"))?;
        worst = worst.max(rel);
        let r = check_eq74(t, a, &tables).map_err(|e| e.to_string())?;
        ensure(r.verdict == Verdict::Holds, format!("bound at A = {a}, t = {t}: {:?}", r.verdict))?;
    }
    Ok(format!("20 pairs, worst relative error {worst:.2e}"))
}

fn constants() -> Outcome {
    // e^(8nu/3)/nu has derivative zero at nu = 3/8
    let nu = suboptimize(Factor::Nu, 0.05, 3.0).map_err(|e| e.to_string())?.argmin;
    ensure((nu - 0.375).abs() < 1e-6, format!("nu* = {nu}"))?;
    let a1 = a1_formula(KAPPA);
    ensure((a1 - 3537.613).abs() < 0.5, format!("A1 = {a1}"))?;
    let (ledger, _) = build_ledger(16, 0.5).map_err(|e| e.to_string())?;
    for name in ["A2", "C_D [stated A1, A2]", "C_D [computed A1, A2]"] {
        let e = ledger.get(name).ok_or(format!("ledger entry {name} missing"))?;
        ensure(e.rel_deviation.is_some_and(f64::is_finite), format!("{name}: rel_deviation not populated"))?;
    }
    // leading coefficient 2(3/2 + 3/4)/log(7/6)
    let coeff = 4.5 / (7.0f64 / 6.0).ln();
    ensure(coeff <= 29.193, format!("c_A coefficient {coeff}"))?;
    let (recs, _) = check_ca_corollary(LogScaleReal::double_exp(18.0)).map_err(|e| e.to_string())?;
    ensure(recs.len() == 2 && recs.iter().all(|r| r.verdict == Verdict::Holds), "c_A checks do not hold")?;
    let a2 = ledger.get("A2").and_then(|e| e.rel_deviation).unwrap_or(f64::NAN);
    Ok(format!("nu* = {nu:.9}, A1 = {a1:.3}, A2 rel dev {a2:.3}, c_A/log T0 = {:.5}", recs[0].lhs))
}

fn zeros_to_500() -> Result<ZeroOrdinates, String> {
    find_zeros(500.0).map_err(|e| e.to_string())
}

fn zeros(z: &ZeroOrdinates, elapsed: Duration) -> Outcome {
    within(elapsed, 300)?;
    // first ordinate from published zero tables
    let g1 = z.gammas.first().copied().ok_or("no zeros found")?;
    ensure((g1 - 14.134725141734693).abs() < 1e-6, format!("gamma_1 = {g1}"))?;
    let r = check_no_sign_change(14.0, 0.001).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::Holds, "sign change of Z on (0, 14]")?;
    for t in [20.0, 50.0, 100.0, 200.0, 500.0] {
        let r = check_nt_bound(t, z).map_err(|e| e.to_string())?;
        ensure(r.verdict == Verdict::Holds, format!("N({t}) bound: {:?}", r.verdict))?;
        let s = check_smooth_count(t, z);
        ensure(s.verdict == Verdict::Holds, format!("smooth count at {t}: {:?}", s.verdict))?;
    }
    ensure(z.complete_below_flag && z.max_smooth_deviation <= 2.0, format!("max deviation {}", z.max_smooth_deviation))?;
    Ok(format!(
        "gamma_1 = {g1:.9}, N(500) = {}, max |N - smooth| = {:.3}, {:.1} s",
        z.count_below(500.0),
        z.max_smooth_deviation,
        elapsed.as_secs_f64()
    ))
}

fn zero_sums(z: &ZeroOrdinates) -> Outcome {
    let mut n = 0;
    for t in [0.0, 10.0, 14.1347, 50.0, 100.0] {
        let r = check_prop91(t, z).map_err(|e| e.to_string())?;
        let (a, b) = check_prop92(t, U_ASSOCIATE, z).map_err(|e| e.to_string())?;
        for r in [r, a, b] {
            ensure(r.verdict != Verdict::Fails, format!("{} fails", r.check_id))?;
            n += 1;
        }
    }
    Ok(format!("{n} records, none fails"))
}

/// psi by trial division, independent of the sieve.
fn psi_naive(x: u64) -> f64 {
    (2..=x)
        .filter_map(|n| {
            let p = (2..=n).find(|d| n % d == 0)?;
            let mut m = n;
            while m % p == 0 {
                m /= p;
            }
            (m == 1).then(|| (p as f64).ln())
        })
        .sum()
}

fn explicit_formula(z: &ZeroOrdinates) -> Outcome {
    let (means, _) = check_explicit_formula(z).map_err(|e| e.to_string())?;
    ensure(means.len() == 4, "expected four T values")?;
    ensure(means.windows(2).all(|w| w[1].1 < w[0].1), format!("means not strictly decreasing: {means:?}"))?;
    let r = explicit_formula_residual(1000.5, 500.0, z).map_err(|e| e.to_string())?;
    ensure((r.psi - psi_naive(1000)).abs() < 1e-9, "psi(1000) disagrees with trial division")?;
    ensure(r.residual <= 2.0, format!("r(1000.5, 500) = {}", r.residual))?;
    let m: Vec<String> = means.iter().map(|(t, m)| format!("{t}:{m:.4}")).collect();
    Ok(format!("means {}; r(1000.5, 500) = {:.4}", m.join(" "), r.residual))
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn cube_gaps() -> Outcome {
    let start = Instant::now();
    let rows = cube_gap_scan(2, 1000, ScanMode::Exhaustive).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    within(elapsed, 120)?;
    ensure(rows.len() == 999, format!("{} rows", rows.len()))?;
    ensure(check_cube_scan(&rows, "exhaustive").holds(), "exhaustive scan has an empty interval")?;
    for r in rows.iter().take(20) {
        let count = (r.cube..r.next_cube).filter(|&n| is_prime(n)).count() as u64;
        ensure(count == r.census.prime_count, format!("count mismatch at x = {}", r.root))?;
    }
    let sampled = cube_gap_scan(2, 10_000, ScanMode::Sampled).map_err(|e| e.to_string())?;
    ensure(sampled.iter().map(|r| r.root).eq(SAMPLED_ROOTS), "sampled roots")?;
    ensure(check_cube_scan(&sampled, "sampled").holds(), "sampled scan has an empty interval")?;
    let min = rows.iter().map(|r| r.census.prime_count).min().unwrap_or(0);
    Ok(format!("999 intervals, min count {min}; sampled ok; {:.1} s", elapsed.as_secs_f64()))
}

fn run_all(threads: usize) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cubegap"))
        .args(["all", "--threads", &threads.to_string()])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(0), format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)))?;
    let json = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    without_timings(&json).map_err(|e| e.to_string())
}

fn determinism() -> Outcome {
    let one = run_all(1)?;
    let eight = run_all(8)?;
    ensure(one == eight, "reports differ between 1 and 8 threads")?;
    Ok(format!("{} bytes identical", one.len()))
}

fn report(n: usize, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    });
    match outcome {
        Ok(detail) => {
            println!("PASS {n:>2} {name}: {detail}");
            true
        }
        Err(detail) => {
            println!("FAIL {n:>2} {name}: {detail}");
            false
        }
    }
}

fn main() {
    let mut ok = true;
    ok &= report(1, "mollifier bound 7.9/A", mollifier_bound);
    ok &= report(2, "exact d(n)/n^2 tail", tail_oracle);
    ok &= report(3, "zeta critical-line grid", zeta_grid);
    ok &= report(4, "J integrals", j_integrals);
    ok &= report(5, "mean-square closed form", mean_square_oracle);
    ok &= report(6, "constants", constants);
    let start = Instant::now();
    let z = zeros_to_500();
    let elapsed = start.elapsed();
    let with_zeros = |f: fn(&ZeroOrdinates) -> Outcome| -> Outcome { f(z.as_ref().map_err(Clone::clone)?) };
    ok &= report(7, "zeros", || zeros(z.as_ref().map_err(Clone::clone)?, elapsed));
    ok &= report(8, "zero sums", || with_zeros(zero_sums));
    ok &= report(9, "explicit formula", || with_zeros(explicit_formula));
    ok &= report(10, "cube gaps", cube_gaps);
    ok &= report(11, "determinism across thread counts", determinism);
    if !ok {
        std::process::exit(1);
    }
}
