//! Verification reports: per-case left/right values folded into worst-case
//! statistics with a reproducible witness.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::numeric::relative_deviation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Two-sided identity, judged by relative deviation.
    Identity,
    /// One-sided `lhs ≤ rhs`, judged by scaled slack.
    Inequality,
}

/// Sides smaller than this fraction of `scale` are below double-precision
/// resolution of the terms that produced them.
pub const CANCELLATION_FLOOR: f64 = 1e-6;

/// One evaluated case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub index: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// Magnitude of the terms that were combined into `lhs` and `rhs`, so
    /// that cancellation noise is not mistaken for a deviation.
    pub scale: f64,
    pub inputs: Vec<(String, f64)>,
}

impl Case {
    pub fn new(index: usize, lhs: f64, rhs: f64) -> Self {
        Self { index, lhs, rhs, scale: 0.0, inputs: Vec::new() }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn input(mut self, name: &str, value: f64) -> Self {
        self.inputs.push((name.into(), value));
        self
    }

    /// `(rhs - lhs) / max(|lhs|, |rhs|, CANCELLATION_FLOOR·scale, 1e-30)`.
    pub fn slack(&self) -> f64 {
        let denom = self.lhs.abs().max(self.rhs.abs()).max(CANCELLATION_FLOOR * self.scale).max(1e-30);
        (self.rhs - self.lhs) / denom
    }

    pub fn relative_deviation(&self) -> f64 {
        relative_deviation(self.lhs, self.rhs, self.scale)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub case: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub inputs: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub label: String,
    pub kind: CheckKind,
    pub case_count: usize,
    /// Smallest scaled slack (inequalities).
    pub min_slack: Option<f64>,
    /// Largest `lhs / rhs` over cases with `rhs > 0` (inequalities).
    pub max_ratio: Option<f64>,
    /// Largest `|lhs - rhs|` (identities).
    pub max_abs_dev: Option<f64>,
    /// Largest relative deviation (identities).
    pub max_rel_dev: Option<f64>,
    pub witness: Option<Witness>,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: Option<u64>,
    pub flags: Vec<String>,
}

/// Folds cases, in the order given, into a [`VerificationReport`].
#[derive(Debug, Clone)]
pub struct Tally {
    label: String,
    kind: CheckKind,
    tolerance: f64,
    seed: Option<u64>,
    count: usize,
    worst: f64,
    min_slack: f64,
    max_ratio: f64,
    max_abs: f64,
    max_rel: f64,
    witness: Option<Witness>,
    flags: Vec<String>,
    non_finite: usize,
}

impl Tally {
    pub fn new(label: impl Into<String>, kind: CheckKind, tolerance: f64) -> Self {
        Self {
            label: label.into(),
            kind,
            tolerance,
            seed: None,
            count: 0,
            worst: f64::NEG_INFINITY,
            min_slack: f64::INFINITY,
            max_ratio: f64::NEG_INFINITY,
            max_abs: 0.0,
            max_rel: 0.0,
            witness: None,
            flags: Vec::new(),
            non_finite: 0,
        }
    }

    pub fn identity(label: impl Into<String>, tolerance: f64) -> Self {
        Self::new(label, CheckKind::Identity, tolerance)
    }

    pub fn inequality(label: impl Into<String>, tolerance: f64) -> Self {
        Self::new(label, CheckKind::Inequality, tolerance)
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn flag(&mut self, msg: impl Into<String>) {
        let msg = msg.into();
        if !self.flags.contains(&msg) {
            self.flags.push(msg);
        }
    }

    pub fn record(&mut self, case: Case) {
        self.count += 1;
        if !case.lhs.is_finite() || !case.rhs.is_finite() {
            self.non_finite += 1;
            if self.witness.is_none() || self.worst.is_finite() {
                self.worst = f64::INFINITY;
                self.witness = Some(Witness { case: case.index, lhs: case.lhs, rhs: case.rhs, inputs: case.inputs });
            }
            return;
        }
        let badness = match self.kind {
            CheckKind::Identity => {
                let rel = case.relative_deviation();
                self.max_abs = self.max_abs.max((case.lhs - case.rhs).abs());
                self.max_rel = self.max_rel.max(rel);
                rel
            }
            CheckKind::Inequality => {
                let s = case.slack();
                self.min_slack = self.min_slack.min(s);
                if case.rhs > 0.0 {
                    self.max_ratio = self.max_ratio.max(case.lhs / case.rhs);
                }
                -s
            }
        };
        if badness > self.worst {
            self.worst = badness;
            self.witness = Some(Witness { case: case.index, lhs: case.lhs, rhs: case.rhs, inputs: case.inputs });
        }
    }

    pub fn finish(mut self) -> VerificationReport {
        if self.non_finite > 0 {
            self.flag(alloc::format!("{} case(s) produced non-finite values", self.non_finite));
        }
        let (min_slack, max_ratio, max_abs_dev, max_rel_dev, ok) = match self.kind {
            CheckKind::Identity => {
                let ok = self.max_rel < self.tolerance;
                (None, None, Some(self.max_abs), Some(self.max_rel), ok)
            }
            CheckKind::Inequality => {
                let slack = if self.count > self.non_finite { self.min_slack } else { 0.0 };
                let ratio = if self.max_ratio.is_finite() { Some(self.max_ratio) } else { None };
                (Some(slack), ratio, None, None, slack >= -self.tolerance)
            }
        };
        VerificationReport {
            label: self.label,
            kind: self.kind,
            case_count: self.count,
            min_slack,
            max_ratio,
            max_abs_dev,
            max_rel_dev,
            witness: self.witness,
            tolerance: self.tolerance,
            pass: ok && self.non_finite == 0 && self.count > 0,
            seed: self.seed,
            flags: self.flags,
        }
    }
}

impl VerificationReport {
    /// One-line human summary, `PASS`/`FAIL` first.
    pub fn summary_line(&self) -> String {
        let stat = match self.kind {
            CheckKind::Identity => alloc::format!("max_rel_dev={:.3e}", self.max_rel_dev.unwrap_or(f64::NAN)),
            CheckKind::Inequality => alloc::format!("min_slack={:.3e}", self.min_slack.unwrap_or(f64::NAN)),
        };
        alloc::format!(
            "{} {} cases={} {} tol={:.1e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.label,
            self.case_count,
            stat,
            self.tolerance
        )
    }
}
