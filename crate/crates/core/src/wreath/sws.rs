//! The switch-walk-switch walk on `Lambda wr_S M_m`.
//!
//! Step `t` switches the lamp at `o.Y_{t-1}^{-1}`, moves the group walk by
//! `G_t`, and switches the lamp at `o.Y_t^{-1}`. This is the product
//! `X_n = prod_t (L_t at o) G_t (L'_t at o)` in the semidirect product
//! `(l, g)(l', g') = (l l'(. g), g g')`.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::lamps::LampGroup;
use crate::automaton::{
    sample_step, Automorphism, BoundaryPoint, Generator, InvertedWalker, MotherGroup, OccupationMeasure, WalkWord,
};
use crate::error::{Error, Result};
use crate::rng::run_replicas;

/// Finitely supported lamp configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct LampConfig<E> {
    lamps: HashMap<BoundaryPoint, E>,
}

impl<E: Clone + PartialEq> LampConfig<E> {
    pub fn new() -> Self {
        Self { lamps: HashMap::new() }
    }

    pub fn get(&self, s: &BoundaryPoint) -> Option<&E> {
        self.lamps.get(s)
    }

    /// Sites whose lamp is not the identity.
    pub fn support<L: LampGroup<Element = E>>(&self, lamps: &L) -> Vec<&BoundaryPoint> {
        let id = lamps.identity();
        self.lamps.iter().filter(|(_, e)| **e != id).map(|(s, _)| s).collect()
    }

    /// `lamp(s) <- lamp(s) x`; returns the change in total lamp length.
    pub fn switch<L: LampGroup<Element = E>>(&mut self, lamps: &L, s: &BoundaryPoint, x: &E) -> i64 {
        let old = self.lamps.entry(s.clone()).or_insert_with(|| lamps.identity());
        let before = lamps.length(old) as i64;
        *old = lamps.compose(old, x);
        lamps.length(old) as i64 - before
    }

    /// Equality up to identity entries.
    pub fn same_as<L: LampGroup<Element = E>>(&self, other: &Self, lamps: &L) -> bool {
        let id = lamps.identity();
        let sub = |a: &Self, b: &Self| a.lamps.iter().all(|(s, e)| b.lamps.get(s).unwrap_or(&id) == e);
        sub(self, other) && sub(other, self)
    }
}

impl<E: Clone + PartialEq> Default for LampConfig<E> {
    fn default() -> Self {
        Self::new()
    }
}

/// `sum_s length(lamp(s))`.
pub fn lamp_length_stat<L: LampGroup>(config: &LampConfig<L::Element>, lamps: &L) -> u64 {
    config.lamps.values().map(|e| lamps.length(e)).sum()
}

/// `sum_s lambda_lower(Q_n(s))`.
pub fn theoretical_speed_stat(occupation: &OccupationMeasure, lambda_lower: impl Fn(f64) -> f64) -> f64 {
    let mut counts: Vec<u64> = occupation.iter().map(|(_, c)| c).collect();
    counts.sort_unstable();
    counts.into_iter().map(|c| lambda_lower(c as f64)).sum()
}

#[derive(Clone, Debug)]
pub struct SwsOutcome<E> {
    pub config: LampConfig<E>,
    pub word: WalkWord,
    /// `o.Y_t^{-1}` for `t = 0..n`.
    pub points: Vec<BoundaryPoint>,
    pub occupation: OccupationMeasure,
}

/// Runs `n` steps. Randomness per step is drawn in the order `L_t`, `G_t`, `L'_t`.
pub fn sws_walk<L: LampGroup, R: Rng + ?Sized>(
    group: &MotherGroup,
    lamps: &L,
    n: usize,
    rng: &mut R,
) -> SwsOutcome<L::Element> {
    let mut walker = InvertedWalker::new(group);
    let mut config = LampConfig::new();
    let mut occupation = OccupationMeasure::new();
    let mut points = Vec::with_capacity(n + 1);
    let mut gens = Vec::with_capacity(n);
    occupation.record(walker.point());
    points.push(walker.point().clone());
    for _ in 0..n {
        let l = lamps.sample_switch(rng);
        config.switch(lamps, walker.point(), &l);
        let g = sample_step(group, rng);
        walker.step(&g);
        gens.push(g);
        let l2 = lamps.sample_switch(rng);
        config.switch(lamps, walker.point(), &l2);
        occupation.record(walker.point());
        points.push(walker.point().clone());
    }
    SwsOutcome { config, word: WalkWord::from_generators(gens), points, occupation }
}

/// An element of the permutational wreath product.
#[derive(Clone, Debug)]
pub struct WreathElement<E> {
    pub lamps: LampConfig<E>,
    pub group: Automorphism,
}

/// `(l, g)(l', g') = (l l'(. g), g g')`, evaluated literally.
pub fn wreath_multiply<L: LampGroup>(
    group: &MotherGroup,
    lamps: &L,
    a: &WreathElement<L::Element>,
    b: &WreathElement<L::Element>,
) -> WreathElement<L::Element> {
    let mut out = a.lamps.clone();
    let g_inv = group.invert(&a.group);
    for (t, e) in &b.lamps.lamps {
        // l'(s.g) is nontrivial where s.g = t, i.e. s = t.g^{-1}
        let s = group.act(&g_inv, t).expect("lamp sites are level-consistent");
        out.switch(lamps, &s, e);
    }
    WreathElement { lamps: out, group: group.compose(&a.group, &b.group).expect("root depth") }
}

/// Replays `sws_walk` with the same randomness through [`wreath_multiply`].
pub fn sws_direct<L: LampGroup, R: Rng + ?Sized>(
    group: &MotherGroup,
    lamps: &L,
    n: usize,
    rng: &mut R,
) -> WreathElement<L::Element> {
    let lamp_at_origin = |e: L::Element| {
        let mut c = LampConfig::new();
        c.switch(lamps, &BoundaryPoint::origin(), &e);
        WreathElement { lamps: c, group: group.identity() }
    };
    let mut x = WreathElement { lamps: LampConfig::new(), group: group.identity() };
    for _ in 0..n {
        let l = lamp_at_origin(lamps.sample_switch(rng));
        let g: Generator = sample_step(group, rng);
        let step = WreathElement { lamps: LampConfig::new(), group: g.to_automorphism(group) };
        let l2 = lamp_at_origin(lamps.sample_switch(rng));
        x = wreath_multiply(group, lamps, &x, &l);
        x = wreath_multiply(group, lamps, &x, &step);
        x = wreath_multiply(group, lamps, &x, &l2);
    }
    x
}

/// Statistics of one replica at a checkpoint `n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwsSample {
    pub n: usize,
    pub lamp_length: u64,
    pub theoretical: f64,
    pub orbit_size: usize,
}

/// Runs one walk up to the largest checkpoint, tracking the statistics
/// incrementally and reporting them at each (sorted, distinct) checkpoint.
pub fn sws_checkpoints<L: LampGroup, R: Rng + ?Sized>(
    group: &MotherGroup,
    lamps: &L,
    checkpoints: &[usize],
    rng: &mut R,
) -> Vec<SwsSample> {
    let mut walker = InvertedWalker::new(group);
    let mut config = LampConfig::new();
    let mut occupation = OccupationMeasure::new();
    let mut length: i64 = 0;
    let mut theoretical = 0.0;
    let visit = |occ: &mut OccupationMeasure, p: &BoundaryPoint, theo: &mut f64| {
        occ.record(p);
        let c = occ.count(p) as f64;
        *theo += lamps.lambda_lower(c) - lamps.lambda_lower(c - 1.0);
    };
    visit(&mut occupation, walker.point(), &mut theoretical);
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    let top = checkpoints.iter().copied().max().unwrap_or(0);
    for t in 1..=top {
        let l = lamps.sample_switch(rng);
        length += config.switch(lamps, walker.point(), &l);
        let g = sample_step(group, rng);
        walker.step(&g);
        let l2 = lamps.sample_switch(rng);
        length += config.switch(lamps, walker.point(), &l2);
        visit(&mut occupation, walker.point(), &mut theoretical);
        while next.peek() == Some(&&t) {
            next.next();
            out.push(SwsSample {
                n: t,
                lamp_length: length as u64,
                theoretical,
                orbit_size: occupation.support_size(),
            });
        }
    }
    out
}

/// Replica means with standard errors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedRow {
    pub n: usize,
    pub replicas: u64,
    pub mean_lamp_length: f64,
    pub stderr: f64,
    pub mean_theoretical: f64,
    pub theoretical_stderr: f64,
    pub mean_orbit_size: f64,
    pub orbit_stderr: f64,
}

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let xs: Vec<f64> = xs.into_iter().collect();
    let k = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// `replicas` independent walks on streams `(seed, 0..replicas)`.
pub fn speed_experiment<L: LampGroup>(
    group: &MotherGroup,
    lamps: &L,
    grid: &[usize],
    replicas: u64,
    seed: u64,
) -> Result<Vec<SpeedRow>> {
    if replicas == 0 || grid.is_empty() || grid.contains(&0) {
        return Err(Error::InvalidInput("need replicas >= 1 and a grid of positive n".into()));
    }
    let mut grid = grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let samples = run_replicas(seed, replicas, |_, rng| sws_checkpoints(group, lamps, &grid, rng));
    Ok(grid
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let (ml, sl) = mean_stderr(samples.iter().map(|s| s[i].lamp_length as f64));
            let (mt, st) = mean_stderr(samples.iter().map(|s| s[i].theoretical));
            let (mo, so) = mean_stderr(samples.iter().map(|s| s[i].orbit_size as f64));
            SpeedRow {
                n,
                replicas,
                mean_lamp_length: ml,
                stderr: sl,
                mean_theoretical: mt,
                theoretical_stderr: st,
                mean_orbit_size: mo,
                orbit_stderr: so,
            }
        })
        .collect())
}
