//! The projected assembly-line chain on Gray positions `0, 1, 2, ...`.
//!
//! Each step tosses a fair coin. Heads resamples the front bit `b_1`
//! (awake with probability `1 - 1/m_1`); tails resamples the bit just after
//! the first awake worker, and is a hold at the origin. In Gray coordinates
//! both moves are `+-1` steps, so the chain is a birth-and-death chain whose
//! stationary weights are `pi(b) = prod (m_i - 1)^{b_i}`.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::gray::{gray_bits, gray_position, BinaryState, MAX_LEVEL};
use crate::report::BoundCheck;
use crate::scalar::Scalar;
use crate::sequence::{DegreeSequence, ScaleTable};

/// Largest horizon accepted for the exact-rational return-time recursion.
pub const EXACT_HORIZON_LIMIT: usize = 1 << 12;

/// One-step law of the binary state, split by mechanism.
#[derive(Debug, Clone, PartialEq)]
pub struct StepKernel<T> {
    pub stay: T,
    pub toggle_front: T,
    pub toggle_after_first_nonzero: T,
}

/// The same law in Gray coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Moves<T> {
    pub down: T,
    pub stay: T,
    pub up: T,
}

/// Probability that resampling a bit with `m` letters changes it.
fn flip_probability<T: Scalar>(m: u32, current: u8) -> T {
    let m = u64::from(m);
    // heads/tails coin contributes the factor 1/2
    if current == 0 {
        T::from_ratio(m - 1, 2 * m)
    } else {
        T::from_ratio(1, 2 * m)
    }
}

pub fn step_kernel<T: Scalar>(seq: &DegreeSequence, state: BinaryState) -> StepKernel<T> {
    let toggle_front = flip_probability::<T>(seq.degree(1), state.bit(1));
    let toggle_after = match state.first_nonzero() {
        Some(i) => flip_probability::<T>(seq.degree(i + 1), state.bit(i + 1)),
        None => T::zero(),
    };
    let stay = T::one() - toggle_front.clone() - toggle_after.clone();
    StepKernel { stay, toggle_front, toggle_after_first_nonzero: toggle_after }
}

/// Gray position reached by the tails move from `position`, if there is one.
fn tails_neighbor(position: u64) -> Option<u64> {
    let b = BinaryState::from_raw(position ^ (position >> 1));
    let i = b.first_nonzero()?;
    // The low i position bits all equal the suffix parity at i.
    if (position >> (i - 1)) & 1 == 1 {
        Some(position + 1)
    } else {
        Some(position - 1)
    }
}

/// Kernel of the untruncated chain at `position`.
pub fn position_moves<T: Scalar>(seq: &DegreeSequence, position: u64) -> Moves<T> {
    let state = BinaryState::from_raw(position ^ (position >> 1));
    let k = step_kernel::<T>(seq, state);
    let heads_up = position & 1 == 0;
    let (mut down, mut up) = (T::zero(), T::zero());
    if heads_up {
        up = up + k.toggle_front;
    } else {
        down = down + k.toggle_front;
    }
    match tails_neighbor(position) {
        Some(p) if p > position => up = up + k.toggle_after_first_nonzero,
        Some(_) => down = down + k.toggle_after_first_nonzero,
        None => {}
    }
    Moves { down, stay: k.stay, up }
}

/// Stationary weight `prod (m_i - 1)^{b_i}` of the state at `position`.
pub fn stationary_weight(seq: &DegreeSequence, position: u64) -> BigUint {
    let b = BinaryState::from_raw(position ^ (position >> 1));
    (1..=b.len())
        .filter(|&i| b.bit(i) == 1)
        .fold(BigUint::one(), |acc, i| acc * (seq.degree(i) - 1))
}

/// The chain restricted to positions `0..=top`; the up-move out of `top`
/// becomes a hold.
#[derive(Debug, Clone)]
pub struct TruncatedChain<T> {
    seq: DegreeSequence,
    top: u64,
    moves: Vec<Moves<T>>,
    weights: Vec<T>,
}

impl<T: Scalar> TruncatedChain<T> {
    pub fn new(seq: &DegreeSequence, top: u64) -> Result<Self> {
        if top >= 1 << MAX_LEVEL {
            return Err(Error::OutOfRange(format!("top position {top} too large")));
        }
        let mut moves = Vec::with_capacity(top as usize + 1);
        let mut weights = Vec::with_capacity(top as usize + 1);
        for p in 0..=top {
            let mut mv = position_moves::<T>(seq, p);
            if p == top {
                mv.stay = mv.stay + mv.up;
                mv.up = T::zero();
            }
            moves.push(mv);
            weights.push(T::from_biguint(&stationary_weight(seq, p)));
        }
        Ok(Self { seq: seq.clone(), top, moves, weights })
    }

    /// All binary strings of length at most `level`: positions `0..2^level`.
    pub fn at_level(seq: &DegreeSequence, level: usize) -> Result<Self> {
        if level > MAX_LEVEL - 1 {
            return Err(Error::OutOfRange(format!("level {level} too large")));
        }
        Self::new(seq, (1u64 << level) - 1)
    }

    /// Positions `0..=2^level`, the graph "truncated at `2^level`".
    pub fn stopped_at(seq: &DegreeSequence, level: usize) -> Result<Self> {
        if level > MAX_LEVEL - 1 {
            return Err(Error::OutOfRange(format!("level {level} too large")));
        }
        Self::new(seq, 1u64 << level)
    }

    pub fn sequence(&self) -> &DegreeSequence {
        &self.seq
    }

    pub fn top(&self) -> u64 {
        self.top
    }

    pub fn moves(&self, position: u64) -> &Moves<T> {
        &self.moves[position as usize]
    }

    pub fn weight(&self, position: u64) -> &T {
        &self.weights[position as usize]
    }

    /// Conductance `pi(x) P(x, x+1)` of the edge `{x, x+1}`.
    pub fn conductance(&self, x: u64) -> T {
        self.weights[x as usize].clone() * self.moves[x as usize].up.clone()
    }

    /// First position whose row does not sum to one.
    pub fn row_sum_violation(&self) -> Option<u64> {
        self.moves
            .iter()
            .position(|m| m.down.clone() + m.stay.clone() + m.up.clone() != T::one())
            .map(|p| p as u64)
    }

    /// First edge `{x, x+1}` where detailed balance fails.
    pub fn reversibility_violation(&self) -> Option<u64> {
        (0..self.top).find(|&x| {
            let fwd = self.conductance(x);
            let back = self.weights[x as usize + 1].clone() * self.moves[x as usize + 1].down.clone();
            fwd != back
        })
    }

    /// Expected return time to the origin, `sum pi / pi(o)`.
    pub fn expected_return_time(&self) -> T {
        let total = self.weights.iter().cloned().fold(T::zero(), |a, b| a + b);
        total / self.weights[0].clone()
    }

    /// `E_x[hit o]` for every position, by solving the first-step equations
    /// (a tridiagonal system) directly.
    pub fn hitting_times_to_origin(&self) -> Vec<T> {
        let n = self.top as usize;
        let mut out = vec![T::zero(); n + 1];
        if n == 0 {
            return out;
        }
        // Unknowns E_1..E_n:
        //   -down_x E_{x-1} + (down_x + up_x) E_x - up_x E_{x+1} = 1.
        let mut c_prime = vec![T::zero(); n + 1];
        let mut d_prime = vec![T::zero(); n + 1];
        for x in 1..=n {
            let mv = &self.moves[x];
            let a = if x > 1 { T::zero() - mv.down.clone() } else { T::zero() };
            let b = mv.down.clone() + mv.up.clone();
            let c = T::zero() - mv.up.clone();
            let denom = b - a.clone() * c_prime[x - 1].clone();
            c_prime[x] = c / denom.clone();
            d_prime[x] = (T::one() - a * d_prime[x - 1].clone()) / denom;
        }
        out[n] = d_prime[n].clone();
        for x in (1..n).rev() {
            out[x] = d_prime[x].clone() - c_prime[x].clone() * out[x + 1].clone();
        }
        out
    }

    /// Expected return time obtained from the first-step equations; a second
    /// route to [`Self::expected_return_time`].
    pub fn return_time_by_first_step(&self) -> T {
        if self.top == 0 {
            return T::one();
        }
        let h = self.hitting_times_to_origin();
        T::one() + self.moves[0].up.clone() * h[1].clone()
    }

    /// Birth-and-death hitting-time formula for `E_top[hit o]`.
    pub fn hitting_time_top(&self) -> HittingFormula<T> {
        let n = self.top as usize;
        // suffix[i] = sum_{j >= i} pi_j
        let mut suffix = vec![T::zero(); n + 2];
        for i in (0..=n).rev() {
            suffix[i] = suffix[i + 1].clone() + self.weights[i].clone();
        }
        let mut standard = T::zero();
        let mut shifted = T::zero();
        for i in 1..=n {
            let resist = T::one() / self.conductance(i as u64 - 1);
            standard = standard + resist.clone() * suffix[i].clone();
            shifted = shifted + resist * suffix[i + 1].clone();
        }
        HittingFormula { standard, shifted }
    }

    /// Series resistance between positions `a <= b`.
    pub fn effective_resistance(&self, a: u64, b: u64) -> Result<T> {
        if a > b || b > self.top {
            return Err(Error::OutOfRange(format!("resistance between {a} and {b} (top {})", self.top)));
        }
        Ok((a..b).fold(T::zero(), |acc, x| acc + T::one() / self.conductance(x)))
    }

    /// `P_o(hit 2^level before returning to o)`; holds at `o` count as returns.
    pub fn escape_probability(&self, level: usize) -> Result<T> {
        let target = 1u64 << level;
        let r = self.effective_resistance(0, target)?;
        Ok(T::one() / (self.weights[0].clone() * r))
    }

    /// `P_top(T' > t)` for `t = 0..=horizon`, where `T'` is the hitting time of
    /// the origin started from the top position.
    pub fn hitting_tail_from_top(&self, horizon: usize) -> Vec<T> {
        let n = self.top as usize;
        let mut dist = vec![T::zero(); n + 1];
        dist[n] = T::one();
        let mut next = vec![T::zero(); n + 1];
        let mut tail = Vec::with_capacity(horizon + 1);
        tail.push(if n == 0 { T::zero() } else { T::one() });
        for _ in 0..horizon {
            next.iter_mut().for_each(|v| *v = T::zero());
            for x in 1..=n {
                let mass = &dist[x];
                if mass.is_zero() {
                    continue;
                }
                let mv = &self.moves[x];
                next[x - 1] = next[x - 1].clone() + mass.clone() * mv.down.clone();
                next[x] = next[x].clone() + mass.clone() * mv.stay.clone();
                if x < n {
                    next[x + 1] = next[x + 1].clone() + mass.clone() * mv.up.clone();
                }
            }
            next[0] = T::zero();
            std::mem::swap(&mut dist, &mut next);
            tail.push(dist.iter().cloned().fold(T::zero(), |a, b| a + b));
        }
        tail
    }
}

/// Both readings of the hitting-time sum: the standard one (inner sum from
/// `j = i`) and the shifted one (inner sum from `j = i + 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct HittingFormula<T> {
    pub standard: T,
    pub shifted: T,
}

/// Tail probabilities `P(T > i)` of the first return time to the origin.
#[derive(Debug, Clone)]
pub struct ReturnTail<T> {
    tail: Vec<T>,
    partial: Vec<T>,
}

impl<T: Scalar> ReturnTail<T> {
    /// Forward recursion on the untruncated chain up to `horizon`.
    ///
    /// The state vector only covers positions reachable with nonzero mass, so
    /// the float path costs far less than `horizon^2 / 2` once the far tail
    /// underflows.
    pub fn compute(seq: &DegreeSequence, horizon: usize) -> Result<Self> {
        if T::EXACT && horizon > EXACT_HORIZON_LIMIT {
            return Err(Error::OutOfRange(format!(
                "exact return tails are limited to horizon {EXACT_HORIZON_LIMIT}"
            )));
        }
        let mut moves: Vec<Moves<T>> = vec![position_moves(seq, 0)];
        let mut tail = Vec::with_capacity(horizon + 1);
        tail.push(T::one());
        // dist[x] = P(X_i = x, T > i) for x >= 1
        let mut dist: Vec<T> = vec![T::zero(), moves[0].up.clone()];
        let mut hi = 1usize;
        if horizon >= 1 {
            tail.push(dist[1].clone());
        }
        let mut next: Vec<T> = Vec::new();
        for i in 2..=horizon {
            while moves.len() <= hi + 1 {
                let p = moves.len() as u64;
                moves.push(position_moves(seq, p));
            }
            next.clear();
            next.resize(hi + 2, T::zero());
            for x in 1..=hi {
                let mass = &dist[x];
                if mass.is_zero() {
                    continue;
                }
                let mv = &moves[x];
                next[x - 1] = next[x - 1].clone() + mass.clone() * mv.down.clone();
                next[x] = next[x].clone() + mass.clone() * mv.stay.clone();
                next[x + 1] = next[x + 1].clone() + mass.clone() * mv.up.clone();
            }
            next[0] = T::zero();
            hi += 1;
            while hi > 1 && next[hi].is_zero() {
                hi -= 1;
            }
            next.truncate(hi + 1);
            std::mem::swap(&mut dist, &mut next);
            let alive = dist.iter().cloned().fold(T::zero(), |a, b| a + b);
            if !T::EXACT && alive.to_f64() < f64::MIN_POSITIVE {
                return Err(Error::Underflow(i));
            }
            tail.push(alive);
        }
        let mut partial = Vec::with_capacity(tail.len());
        let mut acc = T::zero();
        for t in &tail {
            acc = acc + t.clone();
            partial.push(acc.clone());
        }
        Ok(Self { tail, partial })
    }

    pub fn horizon(&self) -> usize {
        self.tail.len() - 1
    }

    pub fn values(&self) -> &[T] {
        &self.tail
    }

    /// `P(T > i)`.
    pub fn prob_greater(&self, i: usize) -> Result<&T> {
        self.tail.get(i).ok_or(Error::HorizonExceeded { requested: i, available: self.horizon() })
    }

    /// `E|Q_n| = sum_{i=0}^{n} P(T > i) = E[T ^ (n+1)]`.
    pub fn orbit_size(&self, n: usize) -> Result<&T> {
        self.partial.get(n).ok_or(Error::HorizonExceeded { requested: n, available: self.horizon() })
    }
}

/// `P(T > i)` for `i = 0..=horizon`.
pub fn return_tail<T: Scalar>(seq: &DegreeSequence, horizon: usize) -> Result<Vec<T>> {
    ReturnTail::<T>::compute(seq, horizon).map(|t| t.tail)
}

/// `E|Q_n|` computed through the return-time tail.
pub fn orbit_size_exact<T: Scalar>(seq: &DegreeSequence, n: usize) -> Result<T> {
    let t = ReturnTail::<T>::compute(seq, n)?;
    t.orbit_size(n).cloned()
}

/// One row of the return-bound table written by the `chain` command.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnBoundRow {
    pub n: usize,
    pub tail: f64,
    pub partial_sum: f64,
    pub alpha: f64,
    /// `n^{alpha - 1} / (500 m_*^2)`
    pub lower_bound: f64,
    /// `2 n^alpha`
    pub upper_bound: f64,
}

impl ReturnBoundRow {
    pub fn margin_low(&self) -> f64 {
        self.tail - self.lower_bound
    }

    pub fn margin_high(&self) -> f64 {
        self.upper_bound - self.partial_sum
    }
}

/// Evaluates the return-probability sandwich at each `n` in `grid`.
pub fn return_bound_rows(
    seq: &DegreeSequence,
    tail: &ReturnTail<f64>,
    grid: &[usize],
) -> Result<Vec<ReturnBoundRow>> {
    let mut table = ScaleTable::new(seq.clone());
    let m_star = f64::from(seq.m_star());
    grid.iter()
        .map(|&n| {
            let nf = (n.max(1)) as f64;
            let alpha = table.alpha(nf)?;
            Ok(ReturnBoundRow {
                n,
                tail: *tail.prob_greater(n)?,
                partial_sum: *tail.orbit_size(n)?,
                alpha,
                lower_bound: nf.powf(alpha - 1.0) / (500.0 * m_star * m_star),
                upper_bound: 2.0 * nf.powf(alpha),
            })
        })
        .collect()
}

/// Checks the return-probability sandwich on `grid`, the truncated-volume
/// bound at every scale `v_l r_l` inside the horizon, and the tail lower
/// bound `P(T > r_{l-1} v_{l-1} / 4) >= 1 / (62 m_* r_l)`.
pub fn check_return_bounds(
    seq: &DegreeSequence,
    tail: &ReturnTail<f64>,
    grid: &[usize],
) -> Result<Vec<BoundCheck>> {
    let mut checks = Vec::new();
    for row in return_bound_rows(seq, tail, grid)? {
        checks.push(
            BoundCheck::new(format!("return tail lower bound n={}", row.n), row.tail)
                .at_least(row.lower_bound)
                .input("n", row.n as f64)
                .input("alpha", row.alpha),
        );
        checks.push(
            BoundCheck::new(format!("orbit size upper bound n={}", row.n), row.partial_sum)
                .at_most(row.upper_bound)
                .input("n", row.n as f64)
                .input("alpha", row.alpha),
        );
    }
    let mut table = ScaleTable::new(seq.clone());
    let m_star = f64::from(seq.m_star());
    let horizon = tail.horizon() as f64;
    for l in 1.. {
        let rec = table.record(l).clone();
        let v = crate::scalar::ratio_to_f64(&num_rational::BigRational::from_integer(rec.volume.clone().into()));
        let scale = crate::scalar::ratio_to_f64(&rec.scale);
        let prev = table.record(l - 1).clone();
        let prev_scale = crate::scalar::ratio_to_f64(&prev.scale);
        let r = crate::scalar::ratio_to_f64(&rec.resistance);
        let mut any = false;
        if scale <= horizon {
            any = true;
            let n = scale.floor() as usize;
            checks.push(
                BoundCheck::new(format!("truncated volume bound l={l}"), *tail.orbit_size(n)?)
                    .at_most(2.0 * v)
                    .input("level", l as f64),
            );
        }
        let t = (prev_scale / 4.0).floor();
        if t <= horizon {
            any = true;
            checks.push(
                BoundCheck::new(format!("hitting-scale tail bound l={l}"), *tail.prob_greater(t as usize)?)
                    .at_least(1.0 / (62.0 * m_star * r))
                    .input("level", l as f64),
            );
        }
        if !any {
            break;
        }
    }
    Ok(checks)
}

/// Hitting-time analysis from the top of the chain truncated at `2^level`.
#[derive(Debug, Clone)]
pub struct HittingReport<T> {
    pub level: usize,
    /// First-step (linear solve) value.
    pub solved: T,
    pub formula: HittingFormula<T>,
    /// `r_{l-1} v_{l-1} (m_l - 1)`
    pub lower_bound: T,
}

pub fn hitting_report<T: Scalar>(seq: &DegreeSequence, level: usize) -> Result<HittingReport<T>> {
    if level == 0 {
        return Err(Error::OutOfRange("hitting analysis needs level >= 1".into()));
    }
    let chain = TruncatedChain::<T>::stopped_at(seq, level)?;
    let solved = chain.hitting_times_to_origin()[chain.top() as usize].clone();
    let formula = chain.hitting_time_top();
    let scale = seq.scale(level - 1);
    let lower_bound = T::from_biguint(scale.numer().magnitude()) / T::from_biguint(scale.denom().magnitude())
        * T::from_u64(u64::from(seq.degree(level) - 1));
    Ok(HittingReport { level, solved, formula, lower_bound })
}

/// `P(T' > E T' / 4)` for the hitting time of the origin from the top of the
/// chain truncated at `2^level`, with `E T'` from the exact linear solve.
pub fn hitting_not_small(seq: &DegreeSequence, level: usize) -> Result<(f64, f64)> {
    let exact = hitting_report::<num_rational::BigRational>(seq, level)?;
    let mean = crate::scalar::ratio_to_f64(&exact.solved);
    let chain = TruncatedChain::<f64>::stopped_at(seq, level)?;
    let cut = (mean / 4.0).floor() as usize;
    let tail = chain.hitting_tail_from_top(cut);
    Ok((tail[cut], mean))
}

/// Gray positions of the binary states, for display and tests.
pub fn position_of(state: BinaryState) -> u64 {
    gray_position(state)
}

/// State at `position`, inverse of [`position_of`].
pub fn state_at(position: u64) -> BinaryState {
    gray_bits(position, MAX_LEVEL).expect("positions below 2^63")
}
