//! Bound checks and experiment reports shared by the verification routines.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A single `lower <= value <= upper` comparison with its margins.
///
/// Exact inputs use zero slack; Monte Carlo inputs pass a slack of a few
/// standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub inputs: BTreeMap<String, f64>,
    pub lower: Option<f64>,
    pub value: f64,
    pub upper: Option<f64>,
    pub slack: f64,
    /// Smallest distance to a violated side; negative when the check fails.
    pub margin: f64,
    pub pass: bool,
}

impl BoundCheck {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        let mut c = Self {
            name: name.into(),
            inputs: BTreeMap::new(),
            lower: None,
            value,
            upper: None,
            slack: 0.0,
            margin: f64::INFINITY,
            pass: true,
        };
        c.evaluate();
        c
    }

    pub fn at_least(mut self, lower: f64) -> Self {
        self.lower = Some(lower);
        self.evaluate();
        self
    }

    pub fn at_most(mut self, upper: f64) -> Self {
        self.upper = Some(upper);
        self.evaluate();
        self
    }

    pub fn within(self, lower: f64, upper: f64) -> Self {
        self.at_least(lower).at_most(upper)
    }

    pub fn with_slack(mut self, slack: f64) -> Self {
        self.slack = slack;
        self.evaluate();
        self
    }

    /// Slack proportional to the larger bound.
    pub fn with_relative_slack(self, rel: f64) -> Self {
        let scale = [self.lower, self.upper].into_iter().flatten().map(f64::abs).fold(0.0, f64::max);
        self.with_slack(rel * scale)
    }

    pub fn input(mut self, key: impl Into<String>, value: f64) -> Self {
        self.inputs.insert(key.into(), value);
        self
    }

    fn evaluate(&mut self) {
        let lo = self.lower.map_or(f64::INFINITY, |l| self.value - (l - self.slack));
        let hi = self.upper.map_or(f64::INFINITY, |u| (u + self.slack) - self.value);
        self.margin = lo.min(hi);
        // NaN anywhere fails the check.
        self.pass = self.margin >= 0.0 && !self.value.is_nan();
    }

    /// Relative margin `margin / |bound|` on the tighter side, for display.
    pub fn relative_margin(&self) -> f64 {
        let scale = [self.lower, self.upper]
            .into_iter()
            .flatten()
            .map(f64::abs)
            .fold(0.0, f64::max);
        if scale > 0.0 {
            self.margin / scale
        } else {
            self.margin
        }
    }
}

impl fmt::Display for BoundCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "[{verdict}] {}: ", self.name)?;
        if let Some(l) = self.lower {
            write!(f, "{l:.6e} <= ")?;
        }
        write!(f, "{:.6e}", self.value)?;
        if let Some(u) = self.upper {
            write!(f, " <= {u:.6e}")?;
        }
        if self.slack > 0.0 {
            write!(f, " (slack {:.3e})", self.slack)?;
        }
        Ok(())
    }
}

/// Log-log slope estimate with a normal-approximation confidence interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub name: String,
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Named statistics, bound checks and fitted slopes from one run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub seed: Option<u64>,
    pub stats: BTreeMap<String, f64>,
    pub checks: Vec<BoundCheck>,
    pub slopes: Vec<SlopeFit>,
}

impl ExperimentReport {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed: Some(seed), ..Self::default() }
    }

    pub fn stat(&mut self, key: impl Into<String>, value: f64) {
        self.stats.insert(key.into(), value);
    }

    pub fn push(&mut self, check: BoundCheck) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = BoundCheck>) {
        self.checks.extend(checks);
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}
