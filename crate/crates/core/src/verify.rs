//! Bundled exact-input checks over a degree sequence, shared by the command
//! line `verify` and `chain --verify` commands.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::bounds::{concavity_check, cor_4_5_bundle, cor_6_4, thm_6_5_bracket, thm_6_6_bracket, Cor45Inputs};
use crate::chain::{check_return_bounds, hitting_not_small, hitting_report, ReturnTail, TruncatedChain};
use crate::designer::log_grid;
use crate::error::Result;
use crate::report::{BoundCheck, ExperimentReport};
use crate::scalar::ratio_to_f64;
use crate::sequence::{DegreeSequence, ScaleTable};
use crate::wreath::{BinaryLamps, IntegerLamps, LampGroup};

/// Relative agreement required between the hitting-time formula and the solve.
pub const HITTING_AGREEMENT: f64 = 1e-10;

fn flag(name: String, ok: bool) -> BoundCheck {
    BoundCheck::new(name, f64::from(u8::from(ok))).at_least(1.0)
}

/// Reversibility and `E T = v_l` on the chains truncated at level `l`.
pub fn return_time_checks(seq: &DegreeSequence, max_level: usize) -> Result<Vec<BoundCheck>> {
    let mut out = Vec::new();
    for l in 1..=max_level {
        let chain = TruncatedChain::<BigRational>::at_level(seq, l)?;
        out.push(flag(format!("reversible l={l}"), chain.reversibility_violation().is_none()));
        out.push(flag(format!("stochastic rows l={l}"), chain.row_sum_violation().is_none()));
        let v = BigRational::from_integer(seq.volume(l).into());
        let et = chain.expected_return_time();
        out.push(
            BoundCheck::new(format!("expected return time = v_l l={l}"), ratio_to_f64(&et))
                .within(ratio_to_f64(&v), ratio_to_f64(&v))
                .input("exact_equal", f64::from(u8::from(et == v))),
        );
        out.push(flag(format!("expected return time exact l={l}"), et == v));
    }
    Ok(out)
}

/// Hitting time of the origin from `2^l`: formula against the linear solve,
/// and the lower bound `r_{l-1} v_{l-1} (m_l - 1)`.
pub fn hitting_checks(seq: &DegreeSequence, max_level: usize) -> Result<Vec<BoundCheck>> {
    let mut out = Vec::new();
    for l in 1..=max_level {
        let rep = hitting_report::<BigRational>(seq, l)?;
        let solved = ratio_to_f64(&rep.solved);
        let standard = ratio_to_f64(&rep.formula.standard);
        let shifted = ratio_to_f64(&rep.formula.shifted);
        out.push(
            BoundCheck::new(format!("hitting formula agrees l={l}"), (standard - solved).abs() / solved)
                .at_most(HITTING_AGREEMENT)
                .input("solved", solved)
                .input("formula", standard)
                .input("shifted_formula", shifted),
        );
        out.push(
            BoundCheck::new(format!("hitting lower bound l={l}"), solved)
                .at_least(ratio_to_f64(&rep.lower_bound))
                .input("exact_ok", f64::from(u8::from(rep.solved >= rep.lower_bound))),
        );
    }
    Ok(out)
}

/// `r_l <= res(o, 2^l) <= 2 m_* r_l`, compared exactly.
pub fn resistance_checks(seq: &DegreeSequence, max_level: usize) -> Result<Vec<BoundCheck>> {
    let mut out = Vec::new();
    let m = BigRational::from_integer(seq.m_star().into());
    let two = BigRational::one() + BigRational::one();
    for l in 0..=max_level {
        let chain = TruncatedChain::<BigRational>::stopped_at(seq, l)?;
        let res = chain.effective_resistance(0, 1u64 << l)?;
        let r = seq.resistance_factor(l);
        let hi = &two * &m * &r;
        let ok = res >= r && res <= hi;
        out.push(
            BoundCheck::new(format!("resistance bracket l={l}"), ratio_to_f64(&res))
                .within(ratio_to_f64(&r), ratio_to_f64(&hi))
                .input("exact_ok", f64::from(u8::from(ok))),
        );
        out.push(flag(format!("resistance bracket exact l={l}"), ok));
    }
    Ok(out)
}

/// `P(T' > E T'/4) >= 1/31` for the hitting time from `2^l`.
pub fn not_small_checks(seq: &DegreeSequence, max_level: usize) -> Result<Vec<BoundCheck>> {
    (1..=max_level)
        .map(|l| {
            let (p, mean) = hitting_not_small(seq, l)?;
            Ok(BoundCheck::new(format!("hitting time not small l={l}"), p).at_least(1.0 / 31.0).input("mean", mean))
        })
        .collect()
}

/// Speed and entropy brackets at each `n` of `grid`, with `p = P(T > n)` and
/// `q = E|Q_n|` exact and the entropy inputs taken from the ray-tree bounds.
pub fn wreath_checks(seq: &DegreeSequence, tail: &ReturnTail<f64>, grid: &[usize]) -> Result<Vec<BoundCheck>> {
    let mut out = Vec::new();
    let mut table = ScaleTable::new(seq.clone());
    let m_star = seq.m_star();
    for &n in grid {
        let nf = n as f64;
        let p = *tail.prob_greater(n)?;
        let q = *tail.orbit_size(n)?;
        let ent = cor_6_4(m_star, q, nf);
        out.extend(lamp_checks(&IntegerLamps, &mut table, n, p, q, ent.element, ent.supp)?);
        out.extend(lamp_checks(&BinaryLamps, &mut table, n, p, q, ent.element, ent.supp)?);
    }
    Ok(out)
}

fn lamp_checks<L: LampGroup>(
    lamps: &L,
    table: &mut ScaleTable,
    n: usize,
    p: f64,
    q: f64,
    h_y: f64,
    h_supp: f64,
) -> Result<Vec<BoundCheck>> {
    let nf = n as f64;
    let name = lamps.name();
    let lo = |t: f64| lamps.lambda_lower(t);
    let hi = |t: f64| lamps.lambda_upper(t);
    let h = |t: f64| lamps.entropy(t);
    let mut out = Vec::new();
    let inputs = Cor45Inputs { n: nf, p, q, h_y, h_supp, orbit: q };
    let b = cor_4_5_bundle(&inputs, lo, hi, h)?;
    out.push(
        BoundCheck::new(format!("{name} speed lower <= tight upper n={n}"), b.speed_lower)
            .at_most(b.speed_upper_tight)
            .input("p", p)
            .input("q", q),
    );
    out.push(
        BoundCheck::new(format!("{name} speed lower <= entropy upper n={n}"), b.speed_lower)
            .at_most(b.speed_upper_entropy),
    );
    out.push(
        BoundCheck::new(format!("{name} entropy lower <= upper n={n}"), b.entropy_lower).at_most(b.entropy_upper),
    );
    let t65 = thm_6_5_bracket(table, nf, lo, hi)?;
    out.push(BoundCheck::new(format!("{name} speed bracket ordered n={n}"), t65.lower).at_most(t65.upper));
    let t66 = thm_6_6_bracket(table, nf, lo, h, lamps.step_entropy())?;
    out.push(BoundCheck::new(format!("{name} entropy bracket ordered n={n}"), t66.lower()).at_most(t66.upper));
    let h_lamp = lamps.step_entropy() * q;
    out.push(
        BoundCheck::new(format!("{name} h1 E|Q_n| chain n={n}"), h_lamp)
            .at_least(t66.lower_finite)
            .at_most(b.entropy_upper),
    );
    out.push(BoundCheck::new(format!("{name} entropy upper chain n={n}"), b.entropy_upper).at_most(t66.upper));
    let grid = log_grid(1.0, nf.max(2.0), 60);
    let conc = concavity_check(h, nf, &grid);
    out.push(flag(format!("{name} x h(n/x) concave n={n}"), conc.pass()));
    Ok(out)
}

/// Grid `2^lo, 2^{lo+1}, ..., 2^hi`.
pub fn dyadic_grid(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|e| 1usize << e).collect()
}

/// Everything checkable from exact inputs: chain identities up to the given
/// levels, the return sandwich at every `n <= horizon` and the wreath
/// brackets on `grid`.
pub fn exact_suite(seq: &DegreeSequence, grid: &[usize], levels: SuiteLevels) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::default();
    rep.extend(return_time_checks(seq, levels.return_time)?);
    rep.extend(hitting_checks(seq, levels.hitting)?);
    rep.extend(resistance_checks(seq, levels.resistance)?);
    rep.extend(not_small_checks(seq, levels.hitting)?);
    let horizon = grid.iter().copied().max().unwrap_or(0).max(levels.horizon);
    let tail = ReturnTail::<f64>::compute(seq, horizon)?;
    let all: Vec<usize> = (1..=levels.horizon).collect();
    rep.extend(check_return_bounds(seq, &tail, &all)?);
    rep.extend(wreath_checks(seq, &tail, grid)?);
    for &n in grid {
        rep.stat(format!("orbit_size_{n}"), *tail.orbit_size(n)?);
        rep.stat(format!("return_tail_{n}"), *tail.prob_greater(n)?);
    }
    if let Some(max) = grid.iter().max() {
        rep.stat("alpha_max_n", ScaleTable::new(seq.clone()).alpha(*max as f64)?);
    }
    rep.stat("m_star", f64::from(seq.m_star()));
    rep.stat("horizon", horizon.to_f64().unwrap_or(f64::NAN));
    Ok(rep)
}

/// Depths of the exact chain checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteLevels {
    pub return_time: usize,
    pub hitting: usize,
    pub resistance: usize,
    /// Return sandwich checked at every `n` up to this.
    pub horizon: usize,
}

impl Default for SuiteLevels {
    fn default() -> Self {
        Self { return_time: 10, hitting: 8, resistance: 12, horizon: 1 << 16 }
    }
}
