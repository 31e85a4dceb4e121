//! The master report, its curves, and the exit-status rule.

use std::collections::BTreeMap;

use mminf_core::scaling::ThetaPoint;
use mminf_core::VerificationReport;
use serde::{Deserialize, Serialize};

use crate::config::SuiteKind;

/// A scalar outcome: passes when `value ≤ threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
    /// Informational checks are reported but do not decide the exit status.
    pub gating: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, threshold, pass: value <= threshold, gating: true }
    }

    /// A yes/no outcome, recorded as `value = 0` (holds) or `1`.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), value: if ok { 0.0 } else { 1.0 }, threshold: 0.0, pass: ok, gating: true }
    }

    pub fn informational(mut self) -> Self {
        self.gating = false;
        self
    }

    pub fn summary_line(&self) -> String {
        let status = match (self.pass, self.gating) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "INFO",
        };
        format!("{status} {} value={:.4e} threshold={:.1e}", self.name, self.value, self.threshold)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: SuiteKind,
    pub pass: bool,
    pub reports: Vec<VerificationReport>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    /// Structured results (classification reports, experiment summaries).
    pub details: BTreeMap<String, serde_json::Value>,
}

impl SuiteReport {
    pub fn new(suite: SuiteKind) -> Self {
        Self { suite, pass: true, reports: Vec::new(), checks: Vec::new(), notes: Vec::new(), details: BTreeMap::new() }
    }

    pub fn detail(&mut self, key: impl Into<String>, value: &impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.details.insert(key.into(), v);
    }

    /// A failed suite whose run stopped on an error.
    pub fn aborted(suite: SuiteKind, error: String) -> Self {
        let mut s = Self::new(suite);
        s.notes.push(format!("error: {error}"));
        s.pass = false;
        s
    }

    pub fn settle(mut self) -> Self {
        self.pass = self.pass && self.reports.iter().all(|r| r.pass) && self.checks.iter().all(|c| c.pass || !c.gating);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MasterReport {
    pub seed: u64,
    pub pass: bool,
    pub suites: Vec<SuiteReport>,
}

impl MasterReport {
    pub fn new(seed: u64, suites: Vec<SuiteReport>) -> Self {
        let pass = suites.iter().all(|s| s.pass);
        Self { seed, pass, suites }
    }

    /// Human-readable lines, one per report and check, then the verdict.
    pub fn summary_lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for s in &self.suites {
            out.push(format!("== {:?} {}", s.suite, if s.pass { "PASS" } else { "FAIL" }));
            out.extend(s.reports.iter().map(|r| r.summary_line()));
            out.extend(s.checks.iter().map(Check::summary_line));
            out.extend(s.notes.iter().map(|n| format!("note: {n}")));
        }
        out.push(format!("{} seed={}", if self.pass { "ALL PASS" } else { "FAILED" }, self.seed));
        out
    }

    /// Failing gating checks and reports, for the witness dump.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for s in &self.suites {
            for r in s.reports.iter().filter(|r| !r.pass) {
                out.push(format!("{} witness={}", r.summary_line(), serde_json::to_string(&r.witness).unwrap_or_default()));
            }
            out.extend(s.checks.iter().filter(|c| c.gating && !c.pass).map(Check::summary_line));
            out.extend(s.notes.iter().filter(|n| n.starts_with("error")).cloned());
        }
        out
    }
}

/// `0` when every suite passes, `1` otherwise.
pub fn exit_status(report: &MasterReport) -> i32 {
    if report.pass {
        0
    } else {
        1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub lambda: f64,
    pub mu: f64,
    pub phi: String,
    pub function: String,
    pub t: f64,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TvRow {
    pub kind: String,
    /// Start state, or the smaller Poisson mean.
    pub a: f64,
    /// Time, or the larger Poisson mean.
    pub b: f64,
    pub tv: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub experiment: String,
    pub phi: String,
    pub function: String,
    pub n_scale: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_target: f64,
    pub rhs_target: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Curves {
    pub decay: Vec<DecayRow>,
    pub theta: Vec<ThetaPoint>,
    pub tv: Vec<TvRow>,
    pub scaling: Vec<ScalingRow>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn informational_checks_do_not_gate() {
        let mut s = SuiteReport::new(SuiteKind::Scaling);
        s.checks.push(Check::at_most("a", 0.5, 0.1).informational());
        s.checks.push(Check::at_most("b", 0.01, 0.1));
        let s = s.settle();
        assert!(s.pass);
        let m = MasterReport::new(1, vec![s]);
        assert_eq!(exit_status(&m), 0);
        let bad = SuiteReport::new(SuiteKind::Tv);
        let mut bad = bad;
        bad.checks.push(Check::holds("c", false));
        assert_eq!(exit_status(&MasterReport::new(1, vec![bad.settle()])), 1);
    }
}
