//! Versioned verification reports.

use std::collections::BTreeMap;

use cubegap_core::check::{BoundCheckRecord, CheckMode, Verdict};
use cubegap_core::constants::ConstantLedger;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "report_v1";
pub const SIGNIFICANT_DIGITS: usize = 15;

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub records: usize,
    pub must_hold: usize,
    pub must_hold_passed: usize,
    pub blocking: Vec<String>,
    pub recorded_fails: Vec<String>,
    pub diagnostics: usize,
}

impl Summary {
    pub fn of(records: &[BoundCheckRecord]) -> Self {
        let mut s = Summary { records: records.len(), ..Default::default() };
        for r in records {
            match r.mode {
                CheckMode::MustHold => {
                    s.must_hold += 1;
                    if r.holds() {
                        s.must_hold_passed += 1;
                    } else {
                        s.blocking.push(r.check_id.clone());
                    }
                }
                CheckMode::Recorded => {
                    if r.verdict == Verdict::Fails {
                        s.recorded_fails.push(r.check_id.clone());
                    }
                }
                CheckMode::Diagnostic => s.diagnostics += 1,
            }
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub schema: &'static str,
    pub run_id: String,
    pub subcommand: String,
    pub config: BTreeMap<String, String>,
    pub config_digest: String,
    pub summary: Summary,
    pub records: Vec<BoundCheckRecord>,
    pub ledger: Option<ConstantLedger>,
    pub tables: BTreeMap<String, Value>,
    /// Wall-clock seconds per stage; the only field that varies between runs.
    pub timings: BTreeMap<String, f64>,
}

impl VerificationReport {
    pub fn exit_code(&self) -> i32 {
        if self.summary.blocking.is_empty() {
            0
        } else {
            1
        }
    }

    /// Pretty JSON with every float rounded to 15 significant digits.
    pub fn to_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        round_floats(&mut v);
        let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
        s.push('\n');
        s
    }

    pub fn records_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["check_id", "paper_ref", "lhs", "rhs", "margin", "numeric_error", "residual", "verdict", "mode", "notes"])
            .expect("in-memory write");
        for r in &self.records {
            let mode = serde_json::to_value(r.mode).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            let verdict =
                serde_json::to_value(r.verdict).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            w.write_record([
                r.check_id.clone(),
                r.paper_ref.clone(),
                fmt_sig(r.lhs),
                fmt_sig(r.rhs),
                fmt_sig(r.margin),
                fmt_sig(r.numeric_error),
                fmt_sig(r.residual),
                verdict,
                mode,
                r.notes.clone(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

/// Round to 15 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

pub fn fmt_sig(x: f64) -> String {
    let r = round_sig(x);
    if r.is_finite() {
        format!("{r}")
    } else {
        format!("{x}")
    }
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(m) = serde_json::Number::from_f64(round_sig(x)) {
                    *n = m;
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// The report JSON with the `timings` object removed, for comparisons.
pub fn without_timings(json: &str) -> Result<String, serde_json::Error> {
    let mut v: Value = serde_json::from_str(json)?;
    if let Value::Object(o) = &mut v {
        o.remove("timings");
    }
    serde_json::to_string_pretty(&v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333333);
        assert_eq!(round_sig(0.0), 0.0);
        assert!(round_sig(f64::NAN).is_nan());
        assert_eq!(fmt_sig(123456789.123456789), "123456789.123457");
    }

    #[test]
    fn summary_and_exit() {
        let recs = vec![
            BoundCheckRecord::upper("a", "", 1.0, 2.0, 0.0).must_hold(),
            BoundCheckRecord::upper("b", "", 3.0, 2.0, 0.0),
            BoundCheckRecord::upper("c", "", 3.0, 2.0, 0.0).diagnostic(),
        ];
        let s = Summary::of(&recs);
        assert_eq!((s.must_hold, s.must_hold_passed, s.diagnostics), (1, 1, 1));
        assert_eq!(s.recorded_fails, vec!["b".to_string()]);
        let mut r = VerificationReport {
            schema: SCHEMA,
            run_id: String::new(),
            subcommand: "t".into(),
            config: BTreeMap::new(),
            config_digest: String::new(),
            summary: s,
            records: recs,
            ledger: None,
            tables: BTreeMap::new(),
            timings: BTreeMap::from([("x".to_string(), 1.5)]),
        };
        assert_eq!(r.exit_code(), 0);
        let j = r.to_json();
        assert!(j.contains("\"schema\": \"report_v1\""));
        assert!(!without_timings(&j).unwrap().contains("timings"));
        assert_eq!(r.records_csv().lines().count(), 4);
        r.records.push(BoundCheckRecord::upper("d", "", 3.0, 2.0, 0.0).must_hold());
        r.summary = Summary::of(&r.records);
        assert_eq!(r.exit_code(), 1);
    }
}
