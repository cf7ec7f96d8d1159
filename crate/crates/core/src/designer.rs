//! Inductive construction of degree sequences whose exponent profile
//! `n^{alpha_n}` tracks a prescribed log-Lipschitz target `f`.

use std::fmt;
use std::sync::Arc;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::BoundCheck;
use crate::sequence::{DegreeSequence, Extension, ScaleTable};

/// Relative slack for comparisons of floating evaluations of `f`.
pub const REL_SLACK: f64 = 1e-9;

/// `c_gamma = 3 e^{1/(1-gamma)}`.
pub fn c_gamma(gamma: f64) -> f64 {
    3.0 * (1.0 / (1.0 - gamma)).exp()
}

fn check_gamma(gamma: f64) -> Result<()> {
    if (0.5..1.0).contains(&gamma) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("gamma = {gamma} outside [1/2, 1)")))
    }
}

/// Smallest `m >= 2` with `(m^2/(m-1))^gamma <= m`.
pub fn choose_m_star(gamma: f64) -> Result<u32> {
    check_gamma(gamma)?;
    // (2 gamma - 1) ln m <= gamma ln(m - 1)
    let fits = |m: u32| {
        let m = f64::from(m);
        (2.0 * gamma - 1.0) * m.ln() <= gamma * (m - 1.0).ln() + 1e-12
    };
    (2u32..).find(|&m| fits(m)).ok_or_else(|| Error::OutOfRange(format!("no m_* for gamma = {gamma}")))
}

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A target growth function with its declared exponent band `[1/2, gamma]`.
#[derive(Clone)]
pub struct TargetFunction {
    name: String,
    gamma: f64,
    eval: Evaluator,
}

impl fmt::Debug for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetFunction").field("name", &self.name).field("gamma", &self.gamma).finish()
    }
}

impl TargetFunction {
    pub fn new(name: impl Into<String>, gamma: f64, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self { name: name.into(), gamma, eval: Arc::new(eval) })
    }

    /// `n^beta`.
    pub fn power(beta: f64, gamma: f64) -> Result<Self> {
        Self::new(format!("pow:{beta}"), gamma, move |n| n.powf(beta))
    }

    /// `n^beta (log(e n))^k`.
    pub fn power_log(beta: f64, k: f64, gamma: f64) -> Result<Self> {
        Self::new(format!("pow-log:{beta},{k}"), gamma, move |n| n.powf(beta) * (1.0 + n.ln()).powf(k))
    }

    /// Parses `pow:beta` or `pow-log:beta,k`.
    pub fn parse(spec: &str, gamma: f64) -> Result<Self> {
        let bad = || Error::InvalidTarget(spec.to_string());
        let (family, params) = spec.split_once(':').ok_or_else(bad)?;
        let nums: Vec<f64> =
            params.split(',').map(|x| x.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
        match (family.trim(), nums.as_slice()) {
            ("pow", [beta]) => Self::power(*beta, gamma),
            ("pow-log", [beta, k]) => Self::power_log(*beta, *k, gamma),
            _ => Err(bad()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `f(n)`; rejects non-positive or non-finite values.
    pub fn eval(&self, n: f64) -> Result<f64> {
        let v = (self.eval)(n);
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(Error::InvalidTarget(format!("{}({n}) = {v}", self.name)))
        }
    }

    /// `f^2(n)/n` with band `[1/2, 2 gamma - 1]`: the target to design for
    /// when `f` prescribes the speed.
    pub fn speed_transform(&self) -> Result<Self> {
        let inner = self.eval.clone();
        let gamma = (2.0 * self.gamma - 1.0).max(0.5);
        Self::new(format!("({})^2/n", self.name), gamma, move |n| inner(n).powi(2) / n)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzViolation {
    pub a: f64,
    pub n: f64,
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub pairs: usize,
    /// `|f(1) - 1| <= REL_SLACK`.
    pub normalized: bool,
    pub violations: Vec<LipschitzViolation>,
}

impl LipschitzReport {
    pub fn pass(&self) -> bool {
        self.normalized && self.violations.is_empty()
    }

    /// The violation with the largest relative excess.
    pub fn worst(&self) -> Option<&LipschitzViolation> {
        let excess = |v: &LipschitzViolation| (v.lower / v.value).max(v.value / v.upper);
        self.violations.iter().max_by(|x, y| excess(x).total_cmp(&excess(y)))
    }
}

/// `count` log-spaced values from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

/// 10 x 10 log-spaced pairs with `a` up to `10^3` and `n` up to `10^6`.
pub fn default_lipschitz_grid() -> Vec<(f64, f64)> {
    let a = log_grid(1.0, 1e3, 10);
    let n = log_grid(1.0, 1e6, 10);
    a.iter().flat_map(|&a| n.iter().map(move |&n| (a, n))).collect()
}

/// Checks `a^{1/2} f(n) <= f(a n) <= a^gamma f(n)` on every pair.
pub fn validate_log_lipschitz(f: &TargetFunction, grid: &[(f64, f64)]) -> Result<LipschitzReport> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty grid".into()));
    }
    let mut violations = Vec::new();
    for &(a, n) in grid {
        if !(a >= 1.0 && n >= 1.0) {
            return Err(Error::InvalidInput(format!("pair ({a}, {n}) below 1")));
        }
        let fn_ = f.eval(n)?;
        let value = f.eval(a * n)?;
        let lower = a.sqrt() * fn_;
        let upper = a.powf(f.gamma) * fn_;
        if value < lower * (1.0 - REL_SLACK) || value > upper * (1.0 + REL_SLACK) {
            violations.push(LipschitzViolation { a, n, lower, value, upper });
        }
    }
    let normalized = (f.eval(1.0)? - 1.0).abs() <= REL_SLACK;
    Ok(LipschitzReport { pairs: grid.len(), normalized, violations })
}

/// One induction step of the construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelTrace {
    pub level: usize,
    pub scale: f64,
    pub volume: f64,
    /// `f(n_l) / v_l`.
    pub ratio: f64,
    /// `m_{l+1}`.
    pub next_degree: u32,
    /// `f(n_{l+1}) / (f(n_l) m_{l+1})`.
    pub step_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignCertificate {
    pub target: String,
    pub gamma: f64,
    pub c_gamma: f64,
    pub m_star: u32,
    pub trace: Vec<LevelTrace>,
}

impl DesignCertificate {
    /// `1/sqrt(m_* - 1) <= f(n_l)/v_l <= 2^{2 gamma - 1}` at every level.
    pub fn level_bracket(&self) -> (f64, f64) {
        (1.0 / f64::from(self.m_star - 1).sqrt().max(1.0), 2f64.powf(2.0 * self.gamma - 1.0))
    }

    pub fn checks(&self) -> Vec<BoundCheck> {
        let (lo, hi) = self.level_bracket();
        let mut out = Vec::new();
        for t in &self.trace {
            out.push(
                BoundCheck::new(format!("level ratio l={}", t.level), t.ratio)
                    .within(lo, hi)
                    .with_relative_slack(REL_SLACK)
                    .input("scale", t.scale)
                    .input("volume", t.volume),
            );
            let m = f64::from(t.next_degree);
            out.push(
                BoundCheck::new(format!("step ratio l={}", t.level), t.step_ratio)
                    .within(1.0 / (m - 1.0).sqrt(), (m * m / (m - 1.0)).powf(self.gamma) / m)
                    .with_relative_slack(REL_SLACK)
                    .input("m", m),
            );
            let allowed = t.next_degree == 2 || t.next_degree == self.m_star;
            out.push(
                BoundCheck::new(format!("degree choice l={}", t.level + 1), f64::from(u8::from(allowed))).at_least(1.0),
            );
        }
        out
    }
}

/// Builds `m_1 .. m_levels` by the rule `m_{l+1} = 2` if `f(n_l)/v_l <= 1`,
/// else `m_*`, starting at `l = 0`. Beyond the head the last degree repeats.
pub fn design_sequence(f: &TargetFunction, levels: usize) -> Result<(DegreeSequence, DesignCertificate)> {
    if levels == 0 {
        return Err(Error::InvalidInput("levels must be at least 1".into()));
    }
    let m_star = choose_m_star(f.gamma)?;
    let mut head = Vec::with_capacity(levels);
    let mut trace = Vec::with_capacity(levels);
    let (mut scale, mut volume) = (1.0f64, 1.0f64);
    let mut ratio = f.eval(1.0)?;
    for level in 0..levels {
        let m = if ratio <= 1.0 + REL_SLACK { 2 } else { m_star };
        let mf = f64::from(m);
        let next_scale = scale * mf * mf / (mf - 1.0);
        let next_volume = volume * mf;
        let step_ratio = f.eval(next_scale)? / f.eval(scale)? / mf;
        trace.push(LevelTrace { level, scale, volume, ratio, next_degree: m, step_ratio });
        head.push(m);
        scale = next_scale;
        volume = next_volume;
        ratio = f.eval(scale)? / volume;
    }
    let seq = DegreeSequence::new(head, Extension::Constant)?;
    let cert = DesignCertificate { target: f.name.clone(), gamma: f.gamma, c_gamma: c_gamma(f.gamma), m_star, trace };
    Ok((seq, cert))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackingRow {
    pub n: f64,
    pub level: usize,
    pub alpha: f64,
    /// `f(n) / n^{alpha_n}`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackingReport {
    pub rows: Vec<TrackingRow>,
    pub checks: Vec<BoundCheck>,
}

impl TrackingReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Checks the tracking brackets of `seq` against `f` on `grid`:
///
/// * `1/c_gamma <= f(n)/n^{alpha_n} <= 2 c_gamma` at every grid point;
/// * `1/sqrt(m_*-1) <= f(n_l)/v_l <= 2^{2 gamma - 1}` at every level with
///   `n_l` inside the grid range;
/// * `1/(m_* sqrt(m_*-1)) <= f(n)/n^{alpha_n} < 2 m_*` at every grid point.
///
/// Here `m_*` is the larger of `choose_m_star(gamma)` and the largest degree.
pub fn verify_tracking(seq: &DegreeSequence, f: &TargetFunction, grid: &[f64]) -> Result<TrackingReport> {
    let gamma = f.gamma;
    let c = c_gamma(gamma);
    let m_star = choose_m_star(gamma)?.max(seq.m_star());
    let ms = f64::from(m_star);
    let root = (ms - 1.0).sqrt();
    let mut table = ScaleTable::new(seq.clone());
    let mut rows = Vec::with_capacity(grid.len());
    let mut checks = Vec::new();
    for &n in grid {
        let (level, alpha) = table.level_of(n)?;
        let ln_v = table.ln_volume(level);
        let ratio = (f.eval(n)?.ln() - ln_v).exp();
        rows.push(TrackingRow { n, level, alpha, ratio });
        checks.push(
            BoundCheck::new(format!("tracking n={n:.6e}"), ratio)
                .within(1.0 / c, 2.0 * c)
                .with_relative_slack(REL_SLACK)
                .input("alpha", alpha),
        );
        checks.push(
            BoundCheck::new(format!("all-n bracket n={n:.6e}"), ratio)
                .within(1.0 / (ms * root), 2.0 * ms)
                .with_relative_slack(REL_SLACK)
                .input("alpha", alpha),
        );
    }
    let top = grid.iter().copied().fold(1.0, f64::max);
    let (lo, hi) = (1.0 / root, 2f64.powf(2.0 * gamma - 1.0));
    for level in 0.. {
        let scale = table.record(level).scale.to_f64().unwrap_or(f64::INFINITY);
        if scale > top {
            break;
        }
        let ratio = (f.eval(scale)?.ln() - table.ln_volume(level)).exp();
        checks.push(
            BoundCheck::new(format!("level bracket l={level}"), ratio)
                .within(lo, hi)
                .with_relative_slack(REL_SLACK)
                .input("scale", scale),
        );
    }
    Ok(TrackingReport { rows, checks })
}
