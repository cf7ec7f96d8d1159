//! Generators, walk words, the assembly-line simulator and the inverted-orbit
//! engines.

use std::collections::HashMap;

use rand::Rng;

use super::boundary::BoundaryPoint;
use super::group::{Automorphism, MotherGroup, Section};
use super::perm::Perm;
use crate::rng::seeded_rng;
use crate::sequence::DegreeSequence;

/// A step of the walk: a root permutation or a power of the propagating action.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Generator {
    Perm(Perm),
    Propagating(u64),
}

impl Generator {
    pub fn inverse(&self, group: &MotherGroup) -> Generator {
        match self {
            Generator::Perm(p) => Generator::Perm(p.inverse()),
            Generator::Propagating(k) => {
                let l = group.h_order();
                Generator::Propagating((l - k % l) % l)
            }
        }
    }

    pub fn is_identity(&self, group: &MotherGroup) -> bool {
        match self {
            Generator::Perm(p) => p.is_identity(),
            Generator::Propagating(k) => k % group.h_order() == 0,
        }
    }

    pub fn to_automorphism(&self, group: &MotherGroup) -> Automorphism {
        match self {
            Generator::Perm(p) => group.root_perm(p.clone()).expect("generator degree matches m_1"),
            Generator::Propagating(k) => group.propagating(*k),
        }
    }

    /// `p <- p.self`, without building a portrait.
    pub fn act_point(&self, seq: &DegreeSequence, p: &mut BoundaryPoint) {
        match self {
            Generator::Perm(perm) => {
                let w = p.letter(1);
                p.set_letter(1, perm.apply(w));
            }
            Generator::Propagating(k) => {
                if let Some(i) = p.letters().iter().position(|&w| w != 0) {
                    let j = i + 2;
                    let m = u64::from(seq.degree(j));
                    let w = u64::from(p.letter(j));
                    p.set_letter(j, ((w + k) % m) as u32);
                }
            }
        }
    }
}

/// One draw from the step distribution: a fair coin chooses between a uniform
/// element of `Sym(m_1)` and a uniform element of `H`.
pub fn sample_step<R: Rng + ?Sized>(group: &MotherGroup, rng: &mut R) -> Generator {
    if rng.random::<bool>() {
        Generator::Perm(Perm::random(group.degree(1), rng))
    } else {
        Generator::Propagating(rng.random_range(0..group.h_order()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkWord {
    seed: Option<u64>,
    generators: Vec<Generator>,
}

impl WalkWord {
    /// The word `G_1 ... G_n` drawn from a fresh stream keyed by `seed`.
    pub fn sample(group: &MotherGroup, n: usize, seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let mut w = Self::from_rng(group, n, &mut rng);
        w.seed = Some(seed);
        w
    }

    pub fn from_rng<R: Rng + ?Sized>(group: &MotherGroup, n: usize, rng: &mut R) -> Self {
        Self { seed: None, generators: (0..n).map(|_| sample_step(group, rng)).collect() }
    }

    pub fn from_generators(generators: Vec<Generator>) -> Self {
        Self { seed: None, generators }
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// `Y_n = G_1 ... G_n` as a portrait.
    pub fn evaluate(&self, group: &MotherGroup) -> Automorphism {
        self.generators
            .iter()
            .fold(group.identity(), |acc, g| group.compose(&acc, &g.to_automorphism(group)).expect("depth 0"))
    }
}

/// `o.Y_t` for `t = 0..n`, through the portrait action.
pub fn forward_orbit(group: &MotherGroup, word: &WalkWord) -> Vec<BoundaryPoint> {
    let mut out = Vec::with_capacity(word.len() + 1);
    let mut p = BoundaryPoint::origin();
    out.push(p.clone());
    for g in word.generators() {
        p = group.act(&g.to_automorphism(group), &p).expect("points stay level-consistent");
        out.push(p.clone());
    }
    out
}

/// The assembly line on letter strings, consuming randomness exactly as
/// [`sample_step`] does.
#[derive(Clone, Debug)]
pub struct AssemblyLine {
    seq: DegreeSequence,
    h_order: u64,
    state: BoundaryPoint,
}

impl AssemblyLine {
    pub fn new(seq: DegreeSequence) -> Self {
        let h_order = seq.tail_lcm(0);
        Self { seq, h_order, state: BoundaryPoint::origin() }
    }

    pub fn state(&self) -> &BoundaryPoint {
        &self.state
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> &BoundaryPoint {
        if rng.random::<bool>() {
            // heads: the front letter gets a uniform relabelling
            let sigma = Perm::random(self.seq.degree(1), rng);
            let w = self.state.letter(1);
            self.state.set_letter(1, sigma.apply(w));
        } else {
            let k = rng.random_range(0..self.h_order);
            if let Some(i) = self.state.letters().iter().position(|&w| w != 0) {
                let m = u64::from(self.seq.degree(i + 2));
                let w = u64::from(self.state.letter(i + 2));
                self.state.set_letter(i + 2, ((w + k) % m) as u32);
            }
        }
        &self.state
    }
}

/// Visit counts `Q_n(s)` of the inverted orbit.
#[derive(Clone, Debug, Default)]
pub struct OccupationMeasure {
    counts: HashMap<BoundaryPoint, u64>,
    total: u64,
}

impl OccupationMeasure {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a visit; returns true if the site is new.
    pub fn record(&mut self, p: &BoundaryPoint) -> bool {
        self.total += 1;
        match self.counts.get_mut(p) {
            Some(c) => {
                *c += 1;
                false
            }
            None => {
                self.counts.insert(p.clone(), 1);
                true
            }
        }
    }

    pub fn count(&self, p: &BoundaryPoint) -> u64 {
        self.counts.get(p).copied().unwrap_or(0)
    }

    /// `|Q_n|`.
    pub fn support_size(&self) -> usize {
        self.counts.len()
    }

    /// `n + 1` after `n` steps.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BoundaryPoint, u64)> {
        self.counts.iter().map(|(p, &c)| (p, c))
    }

    /// Switch counts `2 Q_n(s) - 1_o(s) - 1_last(s)` of the switch-walk-switch walk.
    pub fn switch_count(&self, s: &BoundaryPoint, last: &BoundaryPoint) -> u64 {
        let q = self.count(s);
        if q == 0 {
            return 0;
        }
        2 * q - u64::from(s.is_origin()) - u64::from(s == last)
    }
}

#[derive(Clone, Debug)]
pub struct InvertedOrbit {
    pub points: Vec<BoundaryPoint>,
    pub occupation: OccupationMeasure,
}

impl InvertedOrbit {
    fn from_points(points: Vec<BoundaryPoint>) -> Self {
        let mut occupation = OccupationMeasure::new();
        for p in &points {
            occupation.record(p);
        }
        Self { points, occupation }
    }
}

/// Reference engine: `o.G_t^{-1} ... G_1^{-1}` evaluated from scratch for every
/// prefix. Quadratic in the word length.
pub fn inverted_orbit_reference(group: &MotherGroup, word: &WalkWord) -> InvertedOrbit {
    let seq = group.sequence();
    let inverses: Vec<Generator> = word.generators().iter().map(|g| g.inverse(group)).collect();
    let mut points = Vec::with_capacity(word.len() + 1);
    points.push(BoundaryPoint::origin());
    for t in 1..=inverses.len() {
        let mut p = BoundaryPoint::origin();
        for g in inverses[..t].iter().rev() {
            g.act_point(seq, &mut p);
        }
        points.push(p);
    }
    InvertedOrbit::from_points(points)
}

/// Incremental engine: keeps the portrait of `Y_t^{-1}` and updates it by one
/// left multiplication per step.
#[derive(Clone, Debug)]
pub struct InvertedWalker<'g> {
    group: &'g MotherGroup,
    inverse: Section,
    point: BoundaryPoint,
    steps: u64,
}

impl<'g> InvertedWalker<'g> {
    pub fn new(group: &'g MotherGroup) -> Self {
        Self { group, inverse: Section::Identity, point: BoundaryPoint::origin(), steps: 0 }
    }

    /// `o.Y_t^{-1}`.
    pub fn point(&self) -> &BoundaryPoint {
        &self.point
    }

    /// `Y_t^{-1}` as a portrait.
    pub fn inverse(&self) -> Automorphism {
        self.group.at_depth(0, self.inverse.clone()).expect("root section")
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Advances by `G_{t+1} = g`; returns the new point.
    pub fn step(&mut self, g: &Generator) -> &BoundaryPoint {
        match g.inverse(self.group) {
            Generator::Perm(p) => self.group.left_permute(&p, &mut self.inverse, 0),
            Generator::Propagating(k) => self.group.left_propagate(k, &mut self.inverse, 0),
        }
        self.steps += 1;
        // o is fixed by H, so only root permutations can move the point
        if matches!(g, Generator::Perm(_)) {
            let mut p = BoundaryPoint::origin();
            self.group.act_section(&self.inverse, 0, &mut p);
            self.point = p;
        }
        &self.point
    }
}

/// Inverted orbit through the incremental engine.
pub fn inverted_orbit(group: &MotherGroup, word: &WalkWord) -> InvertedOrbit {
    let mut walker = InvertedWalker::new(group);
    let mut points = Vec::with_capacity(word.len() + 1);
    points.push(BoundaryPoint::origin());
    for g in word.generators() {
        points.push(walker.step(g).clone());
    }
    InvertedOrbit::from_points(points)
}
