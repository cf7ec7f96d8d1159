//! Ray trees of inverted orbits: the prefix closure of the visited rays, its
//! pruning at first lone children, and the minimal full hull.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::boundary::BoundaryPoint;
use super::group::{Automorphism, MotherGroup, Section};
use crate::error::{Error, Result};
use crate::sequence::DegreeSequence;

/// A vertex of the tree: the letters `w_1 .. w_d`.
pub type Vertex = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayTree {
    depth: usize,
    rays: usize,
    children: BTreeMap<Vertex, BTreeSet<u32>>,
}

impl RayTree {
    /// Prefix closure of the rays through `points`, cut one level below the
    /// deepest nonzero letter (beyond it every ray continues with zeros).
    pub fn build(points: &[BoundaryPoint]) -> Self {
        let distinct: BTreeSet<&BoundaryPoint> = points.iter().collect();
        let depth = distinct.iter().map(|p| p.support_len()).max().unwrap_or(0) + 1;
        let mut children: BTreeMap<Vertex, BTreeSet<u32>> = BTreeMap::new();
        for p in &distinct {
            let ray = p.prefix(depth);
            for d in 0..depth {
                children.entry(ray[..d].to_vec()).or_default().insert(ray[d]);
            }
            children.entry(ray).or_default();
        }
        Self { depth, rays: distinct.len(), children }
    }

    /// Number of distinct rays `r`.
    pub fn rays(&self) -> usize {
        self.rays
    }

    /// Depth of the stored part of the tree.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn vertex_count(&self) -> usize {
        self.children.len()
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.children.contains_key(v)
    }

    pub fn children(&self, v: &[u32]) -> impl Iterator<Item = u32> + '_ {
        self.children.get(v).into_iter().flat_map(|c| c.iter().copied())
    }

    fn child_count(&self, v: &[u32]) -> usize {
        self.children.get(v).map_or(0, BTreeSet::len)
    }

    /// Cut every ray just after its first lone child.
    pub fn pruned(&self) -> BTreeSet<Vertex> {
        let mut out = BTreeSet::new();
        if self.rays == 0 {
            return out;
        }
        let mut stack = vec![Vertex::new()];
        while let Some(v) = stack.pop() {
            let kids: Vec<u32> = self.children(&v).collect();
            out.insert(v.clone());
            if kids.len() == 1 {
                let mut c = v;
                c.push(kids[0]);
                out.insert(c);
            } else {
                for x in kids {
                    let mut c = v.clone();
                    c.push(x);
                    stack.push(c);
                }
            }
        }
        out
    }

    /// The pruned tree together with every sibling of its non-root vertices:
    /// the smallest full subtree of `T_m` containing it.
    pub fn minimal(&self, seq: &DegreeSequence) -> BTreeSet<Vertex> {
        let pruned = self.pruned();
        let mut out = pruned.clone();
        for v in &pruned {
            let internal = pruned.iter().any(|u| u.len() == v.len() + 1 && u.starts_with(v));
            if internal {
                for x in 0..seq.degree(v.len() + 1) {
                    let mut c = v.clone();
                    c.push(x);
                    out.insert(c);
                }
            }
        }
        out
    }

    /// Leaves of the pruned tree: the lone children where pruning stopped.
    pub fn lone_children(&self) -> Vec<Vertex> {
        self.children
            .iter()
            .filter(|(v, kids)| kids.len() == 1 && v.len() < self.depth)
            .map(|(v, kids)| {
                let mut c = v.clone();
                c.push(*kids.iter().next().unwrap());
                c
            })
            .collect()
    }

    /// Below every lone child the tree is the single 0-ray.
    pub fn lone_children_end_in_zero_rays(&self) -> bool {
        self.lone_children().iter().all(|c| {
            let mut v = c.clone();
            while v.len() < self.depth {
                if self.child_count(&v) != 1 || self.children(&v).next() != Some(0) {
                    return false;
                }
                v.push(0);
            }
            true
        })
    }

    /// `i <= 3r - 1` for the pruned tree.
    pub fn pruned_bound_holds(&self) -> bool {
        self.pruned().len() + 1 <= 3 * self.rays
    }
}

/// Free-function form of [`RayTree::build`].
pub fn build_ray_tree(points: &[BoundaryPoint]) -> RayTree {
    RayTree::build(points)
}

/// Whether the section of `g` at every lone child of `tree` is a propagating
/// power or trivial.
pub fn lone_sections_propagating(group: &MotherGroup, g: &Automorphism, tree: &RayTree) -> bool {
    tree.lone_children()
        .iter()
        .all(|c| matches!(group.section_at(g, c), Section::Identity | Section::Propagating { .. }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RayTreeCount {
    pub rays: usize,
    pub count: u64,
    /// `(m_* + 1)^{6r}` in natural log.
    pub ln_bound: f64,
}

impl RayTreeCount {
    pub fn within_bound(&self) -> bool {
        (self.count as f64).ln() <= self.ln_bound + 1e-12
    }
}

const SUBSET_LIMIT: u64 = 5_000_000;

/// Distinct pruned trees spanned by `r` rays with support at most `depth`,
/// for `r = 0..=r_max`. Only point sets whose lone children end in 0-rays are
/// counted; for those the pruned tree determines the ray tree.
pub fn count_small_ray_trees(seq: &DegreeSequence, r_max: usize, depth: usize) -> Result<Vec<RayTreeCount>> {
    if r_max > 4 {
        return Err(Error::OutOfRange(format!("r_max = {r_max} exceeds 4")));
    }
    if depth > 6 {
        return Err(Error::OutOfRange(format!("depth = {depth} exceeds 6")));
    }
    let points = all_points(seq, depth);
    let ln_base = f64::from(seq.m_star() + 1).ln();
    let mut out = Vec::with_capacity(r_max + 1);
    for r in 0..=r_max {
        if binomial(points.len() as u64, r as u64) > SUBSET_LIMIT {
            return Err(Error::OutOfRange(format!("too many {r}-subsets of {} points", points.len())));
        }
        let mut seen: HashSet<BTreeSet<Vertex>> = HashSet::new();
        for_each_subset(points.len(), r, &mut |idx| {
            let chosen: Vec<BoundaryPoint> = idx.iter().map(|&i| points[i].clone()).collect();
            let tree = RayTree::build(&chosen);
            if tree.lone_children_end_in_zero_rays() {
                seen.insert(tree.pruned());
            }
        });
        let count = if r == 0 { 1 } else { seen.len() as u64 };
        out.push(RayTreeCount { rays: r, count, ln_bound: 6.0 * r as f64 * ln_base });
    }
    Ok(out)
}

fn all_points(seq: &DegreeSequence, depth: usize) -> Vec<BoundaryPoint> {
    let mut words: Vec<Vec<u32>> = vec![Vec::new()];
    for level in 1..=depth {
        let m = seq.degree(level);
        words = words
            .into_iter()
            .flat_map(|w| {
                (0..m).map(move |x| {
                    let mut v = w.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    words.into_iter().map(BoundaryPoint::from_letters).collect()
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}
