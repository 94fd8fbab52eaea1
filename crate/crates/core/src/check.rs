//! Margin-based verdicts for numerically evaluated inequalities.
//!
//! Every check compares a computed left side against a right side of the
//! form `lhs <= rhs`. The left side may carry two kinds of uncertainty:
//! a symmetric numeric error (rounding, truncation of a convergent
//! evaluation) and a one-sided residual (the majorant of an unsummed tail).
//! A verdict of `Holds` needs the margin to beat ten times the numeric
//! error after the residual has been added; `Fails` needs the finite part
//! alone to exceed the right side by the same factor.

use serde::Serialize;

/// Required ratio of margin to accumulated numeric error.
pub const MARGIN_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Indeterminate,
}

/// How a record participates in the exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    /// Gate: a failure or indeterminate result fails the run.
    MustHold,
    /// Reported with its verdict, never gates.
    Recorded,
    /// Hypothesis out of reach at desk scale; informational only.
    Diagnostic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheckRecord {
    pub check_id: String,
    pub paper_ref: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub numeric_error: f64,
    pub residual: f64,
    pub verdict: Verdict,
    pub mode: CheckMode,
    pub notes: String,
}

impl BoundCheckRecord {
    /// A check of `lhs <= rhs` where `lhs` is known to within `numeric_error`.
    pub fn upper(
        check_id: impl Into<String>,
        paper_ref: impl Into<String>,
        lhs: f64,
        rhs: f64,
        numeric_error: f64,
    ) -> Self {
        let mut rec = Self {
            check_id: check_id.into(),
            paper_ref: paper_ref.into(),
            lhs,
            rhs,
            margin: 0.0,
            numeric_error: numeric_error.abs(),
            residual: 0.0,
            verdict: Verdict::Indeterminate,
            mode: CheckMode::Recorded,
            notes: String::new(),
        };
        rec.judge();
        rec
    }

    /// A check of `lhs >= rhs`, stored as `-lhs <= -rhs`.
    pub fn lower(
        check_id: impl Into<String>,
        paper_ref: impl Into<String>,
        lhs: f64,
        rhs: f64,
        numeric_error: f64,
    ) -> Self {
        let mut rec = Self::upper(check_id, paper_ref, -lhs, -rhs, numeric_error);
        rec.notes = "stored negated: check is lhs >= rhs".into();
        rec
    }

    /// Agreement of two independently computed values: `|a - b| <= tol`.
    pub fn agreement(
        check_id: impl Into<String>,
        paper_ref: impl Into<String>,
        a: f64,
        b: f64,
        tol: f64,
    ) -> Self {
        let mut rec = Self::upper(check_id, paper_ref, (a - b).abs(), tol, 0.0);
        rec.notes = format!("a = {a:.15e}, b = {b:.15e}");
        rec
    }

    /// Add a one-sided residual: the true lhs lies in `[lhs, lhs + residual]`.
    pub fn with_residual(mut self, residual: f64) -> Self {
        self.residual = residual.max(0.0);
        self.judge();
        self
    }

    pub fn with_mode(mut self, mode: CheckMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn must_hold(self) -> Self {
        self.with_mode(CheckMode::MustHold)
    }

    pub fn diagnostic(self) -> Self {
        self.with_mode(CheckMode::Diagnostic)
    }

    pub fn note(mut self, note: impl AsRef<str>) -> Self {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(note.as_ref());
        self
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn fails(&self) -> bool {
        self.verdict == Verdict::Fails
    }

    /// True when the record gates the run and did not hold.
    pub fn blocks(&self) -> bool {
        self.mode == CheckMode::MustHold && self.verdict != Verdict::Holds
    }

    fn judge(&mut self) {
        let upper = self.lhs + self.residual;
        self.margin = self.rhs - upper;
        let need = MARGIN_FACTOR * self.numeric_error;
        self.verdict = if !self.lhs.is_finite() || !self.rhs.is_finite() {
            Verdict::Indeterminate
        } else if self.margin > need && self.margin > 0.0 {
            Verdict::Holds
        } else if self.lhs - self.rhs > need && self.lhs > self.rhs {
            Verdict::Fails
        } else {
            Verdict::Indeterminate
        };
    }
}

/// Collapse a scan of pointwise records into one summary record.
///
/// The summary carries the node with the smallest error-adjusted margin,
/// and the overall verdict is the worst verdict seen.
pub fn summarize(
    check_id: impl Into<String>,
    paper_ref: impl Into<String>,
    records: &[BoundCheckRecord],
) -> BoundCheckRecord {
    let check_id = check_id.into();
    let paper_ref = paper_ref.into();
    let Some(worst) = records.iter().min_by(|a, b| {
        let ka = a.margin - MARGIN_FACTOR * a.numeric_error;
        let kb = b.margin - MARGIN_FACTOR * b.numeric_error;
        ka.total_cmp(&kb)
    }) else {
        return BoundCheckRecord::upper(check_id, paper_ref, f64::NAN, f64::NAN, 0.0)
            .note("empty scan");
    };
    let fails = records.iter().filter(|r| r.fails()).count();
    let indet = records
        .iter()
        .filter(|r| r.verdict == Verdict::Indeterminate)
        .count();
    let mut out = worst.clone();
    out.check_id = check_id;
    out.paper_ref = paper_ref;
    out.verdict = if fails > 0 {
        Verdict::Fails
    } else if indet > 0 {
        Verdict::Indeterminate
    } else {
        Verdict::Holds
    };
    out.notes = format!(
        "{} nodes, {} fails, {} indeterminate; worst node: {}",
        records.len(),
        fails,
        indet,
        worst.notes
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holds_needs_tenfold_margin() {
        assert!(BoundCheckRecord::upper("a", "", 1.0, 2.0, 0.05).holds());
        let r = BoundCheckRecord::upper("a", "", 1.0, 2.0, 0.2);
        assert_eq!(r.verdict, Verdict::Indeterminate);
    }

    #[test]
    fn fails_needs_finite_part_above_rhs() {
        assert!(BoundCheckRecord::upper("a", "", 3.0, 2.0, 0.01).fails());
        // a residual alone never produces a failure
        let r = BoundCheckRecord::upper("a", "", 1.0, 2.0, 0.0).with_residual(5.0);
        assert_eq!(r.verdict, Verdict::Indeterminate);
    }

    #[test]
    fn lower_checks_negate() {
        assert!(BoundCheckRecord::lower("a", "", 0.7, 0.5, 0.0).holds());
        assert!(BoundCheckRecord::lower("a", "", 0.4, 0.5, 0.0).fails());
    }

    #[test]
    fn summary_takes_worst() {
        let recs = vec![
            BoundCheckRecord::upper("p", "", 1.0, 10.0, 0.0).note("t=1"),
            BoundCheckRecord::upper("p", "", 9.0, 10.0, 0.0).note("t=2"),
        ];
        let s = summarize("scan", "ref", &recs);
        assert!(s.holds());
        assert_eq!(s.lhs, 9.0);
        assert!(s.notes.contains("t=2"));
    }
}
