//! Tree automorphisms in portrait form and the piecewise mother group.
//!
//! A [`Section`] is the restriction of an automorphism to the subtree below a
//! vertex. Portraits are finite: below some depth every section is the
//! identity, a plain root permutation, or a power of the propagating action.
//! Sections are kept in a canonical form (see [`MotherGroup::make_node`]), so
//! structural equality coincides with equality of automorphisms.

use std::sync::Arc;

use num_integer::Integer;

use super::boundary::BoundaryPoint;
use super::perm::Perm;
use crate::error::{Error, Result};
use crate::sequence::DegreeSequence;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Section {
    Identity,
    /// Permutes the children of the section root; all deeper sections trivial.
    Perm(Arc<Perm>),
    /// `a_level^power`, rooted at depth `level - 1`.
    Propagating { level: usize, power: u64 },
    Node(Arc<Node>),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Node {
    pub perm: Perm,
    pub children: Vec<Section>,
}

impl Section {
    pub fn is_identity(&self) -> bool {
        matches!(self, Section::Identity)
    }

    /// Sections that are a permutation or a propagating power.
    pub fn is_elementary(&self) -> bool {
        !matches!(self, Section::Node(_))
    }

    /// Number of explicit nodes in the portrait.
    pub fn node_count(&self) -> usize {
        match self {
            Section::Node(n) => 1 + n.children.iter().map(Section::node_count).sum::<usize>(),
            _ => 0,
        }
    }
}

/// An element of `Aut(T_m)` acting on the subtree at depth `depth`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Automorphism {
    depth: usize,
    section: Section,
}

impl Automorphism {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn section(&self) -> &Section {
        &self.section
    }

    pub fn into_section(self) -> Section {
        self.section
    }
}

/// Context for portrait algebra over a fixed degree sequence: the group
/// generated by `Sym(m_1)` and the cyclic group `H` of propagating actions
/// built from full cycles.
#[derive(Debug, Clone)]
pub struct MotherGroup {
    seq: DegreeSequence,
    tail_lcms: Vec<u64>,
    // cycle powers c_m^k, indexed by m then k
    cycles: Vec<Vec<Section>>,
}

impl MotherGroup {
    pub fn new(seq: DegreeSequence) -> Self {
        let limit = seq.head().len() + 1;
        let tail_lcms = (0..=limit).map(|l| seq.tail_lcm(l)).collect();
        let top = seq.m_star();
        let cycles = (0..=top)
            .map(|m| {
                if m < 2 {
                    return Vec::new();
                }
                (0..m)
                    .map(|k| {
                        let p = Perm::cycle_power(m, u64::from(k));
                        if p.is_identity() {
                            Section::Identity
                        } else {
                            Section::Perm(Arc::new(p))
                        }
                    })
                    .collect()
            })
            .collect();
        Self { seq, tail_lcms, cycles }
    }

    pub fn sequence(&self) -> &DegreeSequence {
        &self.seq
    }

    /// `m_level`.
    #[inline]
    pub fn degree(&self, level: usize) -> u32 {
        self.seq.degree(level)
    }

    /// Order of `a_level`, i.e. `lcm{m_j : j > level}`.
    fn order_of_level(&self, level: usize) -> u64 {
        self.tail_lcms[level.min(self.tail_lcms.len() - 1)]
    }

    /// `L_H`: lcm of the distinct degree values. Propagating exponents are
    /// drawn from `0..L_H`.
    pub fn h_order(&self) -> u64 {
        self.tail_lcms[0]
    }

    pub fn identity(&self) -> Automorphism {
        Automorphism { depth: 0, section: Section::Identity }
    }

    /// Root permutation from `Sym(m_1)`.
    pub fn root_perm(&self, perm: Perm) -> Result<Automorphism> {
        if perm.degree() != self.degree(1) {
            return Err(Error::LevelMismatch { expected: self.degree(1) as usize, found: perm.degree() as usize });
        }
        Ok(Automorphism { depth: 0, section: self.perm_section(perm) })
    }

    /// `a_1^power`.
    pub fn propagating(&self, power: u64) -> Automorphism {
        Automorphism { depth: 0, section: self.propagating_section(1, power) }
    }

    /// Wraps a section known to live at `depth`.
    pub fn at_depth(&self, depth: usize, section: Section) -> Result<Automorphism> {
        if let Section::Propagating { level, .. } = section {
            if level != depth + 1 {
                return Err(Error::LevelMismatch { expected: depth + 1, found: level });
            }
        }
        Ok(Automorphism { depth, section })
    }

    fn perm_section(&self, perm: Perm) -> Section {
        if perm.is_identity() {
            Section::Identity
        } else {
            Section::Perm(Arc::new(perm))
        }
    }

    /// Canonical `a_level^power`.
    pub fn propagating_section(&self, level: usize, power: u64) -> Section {
        let k = power % self.order_of_level(level);
        if k == 0 {
            Section::Identity
        } else {
            Section::Propagating { level, power: k }
        }
    }

    /// `c_m^k` as a section.
    fn cycle_section(&self, m: u32, k: u64) -> Section {
        self.cycles[m as usize][(k % u64::from(m)) as usize].clone()
    }

    /// `z <- p z` for a root permutation `p` at `depth`. Nodes owned solely
    /// by `z` are updated in place.
    pub fn left_permute(&self, p: &Perm, z: &mut Section, depth: usize) {
        match z {
            Section::Identity => *z = self.perm_section(p.clone()),
            Section::Perm(q) => *z = self.perm_section(p.then(q)),
            Section::Propagating { .. } => {
                let (perm, children) = self.expand(z, depth);
                let children = (0..p.degree()).map(|i| children[p.apply(i) as usize].clone()).collect();
                *z = self.make_node(depth, p.then(&perm), children);
            }
            Section::Node(arc) => {
                let node = Arc::make_mut(arc);
                let old = std::mem::take(&mut node.children);
                node.children = (0..p.degree()).map(|i| old[p.apply(i) as usize].clone()).collect();
                node.perm = p.then(&node.perm);
                self.normalize(z, depth);
            }
        }
    }

    /// `z <- a_{depth+1}^k z`, in place where possible.
    pub fn left_propagate(&self, k: u64, z: &mut Section, depth: usize) {
        let level = depth + 1;
        match z {
            Section::Identity => *z = self.propagating_section(level, k),
            Section::Propagating { power, .. } => *z = self.propagating_section(level, k + *power),
            _ if k % self.order_of_level(level) == 0 => {}
            Section::Perm(p) => {
                let side = self.cycle_section(self.degree(level + 1), k);
                let mut children = vec![side; p.degree() as usize];
                children[0] = self.propagating_section(level + 1, k);
                *z = self.make_node(depth, (**p).clone(), children);
            }
            Section::Node(arc) => {
                let node = Arc::make_mut(arc);
                self.left_propagate(k, &mut node.children[0], depth + 1);
                if let Section::Perm(c) = self.cycle_section(self.degree(level + 1), k) {
                    for child in &mut node.children[1..] {
                        self.left_permute(&c, child, depth + 1);
                    }
                }
                self.normalize(z, depth);
            }
        }
    }

    /// Restores canonical form of a node whose children are canonical.
    fn normalize(&self, z: &mut Section, depth: usize) {
        if let Section::Node(n) = z {
            if n.children.iter().all(Section::is_identity) {
                *z = self.perm_section(n.perm.clone());
            } else if n.perm.is_identity() {
                if let Some(k) = self.propagating_exponent(depth, &n.children) {
                    *z = self.propagating_section(depth + 1, k);
                }
            }
        }
    }

    /// One level of the portrait of `s` at `depth`: root permutation and the
    /// child sections.
    pub fn expand(&self, s: &Section, depth: usize) -> (Perm, Vec<Section>) {
        let m = self.degree(depth + 1);
        match s {
            Section::Identity => (Perm::identity(m), vec![Section::Identity; m as usize]),
            Section::Perm(p) => ((**p).clone(), vec![Section::Identity; m as usize]),
            Section::Propagating { level, power } => {
                debug_assert_eq!(*level, depth + 1);
                let side = self.cycle_section(self.degree(depth + 2), *power);
                let mut children = vec![side; m as usize];
                children[0] = self.propagating_section(level + 1, *power);
                (Perm::identity(m), children)
            }
            Section::Node(n) => (n.perm.clone(), n.children.clone()),
        }
    }

    /// Canonical section with root permutation `perm` and `children` at
    /// `depth + 1`.
    ///
    /// All-identity children collapse to a [`Section::Perm`] (or the identity)
    /// and the one-level expansion of a propagating power collapses back to
    /// the symbol.
    pub fn make_node(&self, depth: usize, perm: Perm, children: Vec<Section>) -> Section {
        if children.iter().all(Section::is_identity) {
            return self.perm_section(perm);
        }
        if perm.is_identity() {
            if let Some(k) = self.propagating_exponent(depth, &children) {
                return self.propagating_section(depth + 1, k);
            }
        }
        Section::Node(Arc::new(Node { perm, children }))
    }

    /// Solves for `k` with `children` equal to the expansion of `a_{depth+1}^k`.
    fn propagating_exponent(&self, depth: usize, children: &[Section]) -> Option<u64> {
        let level = depth + 1;
        let next = self.degree(level + 1);
        let side_k = match &children[1] {
            Section::Identity => 0,
            Section::Perm(p) => p.cycle_exponent()?,
            _ => return None,
        };
        if children[2..].iter().any(|c| c != &children[1]) {
            return None;
        }
        let deep_k = match &children[0] {
            Section::Identity => 0,
            Section::Propagating { level: l, power } if *l == level + 1 => *power,
            _ => return None,
        };
        let deep_order = self.order_of_level(level + 1);
        let order = self.order_of_level(level);
        debug_assert_eq!(order, deep_order.lcm(&u64::from(next)));
        (0..order / deep_order)
            .map(|t| deep_k + t * deep_order)
            .find(|k| k % u64::from(next) == side_k)
    }

    pub fn compose_sections(&self, a: &Section, b: &Section, depth: usize) -> Section {
        match (a, b) {
            (Section::Identity, _) => b.clone(),
            (_, Section::Identity) => a.clone(),
            (Section::Propagating { level, power: x }, Section::Propagating { power: y, .. }) => {
                self.propagating_section(*level, x + y)
            }
            (Section::Perm(p), Section::Perm(q)) => self.perm_section(p.then(q)),
            _ => {
                let (sa, ca) = self.expand(a, depth);
                let (sb, cb) = self.expand(b, depth);
                // (gh)_i = g_i h_{i.s}
                let children = ca
                    .iter()
                    .enumerate()
                    .map(|(i, gi)| self.compose_sections(gi, &cb[sa.apply(i as u32) as usize], depth + 1))
                    .collect();
                self.make_node(depth, sa.then(&sb), children)
            }
        }
    }

    pub fn invert_section(&self, a: &Section, depth: usize) -> Section {
        match a {
            Section::Identity => Section::Identity,
            Section::Perm(p) => self.perm_section(p.inverse()),
            Section::Propagating { level, power } => {
                let order = self.order_of_level(*level);
                self.propagating_section(*level, order - power % order)
            }
            Section::Node(n) => {
                let inv = n.perm.inverse();
                let children = (0..n.children.len() as u32)
                    .map(|j| self.invert_section(&n.children[inv.apply(j) as usize], depth + 1))
                    .collect();
                self.make_node(depth, inv, children)
            }
        }
    }

    /// `g h`: first `g`, then `h` (right action).
    pub fn compose(&self, g: &Automorphism, h: &Automorphism) -> Result<Automorphism> {
        if g.depth != h.depth {
            return Err(Error::LevelMismatch { expected: g.depth, found: h.depth });
        }
        Ok(Automorphism { depth: g.depth, section: self.compose_sections(&g.section, &h.section, g.depth) })
    }

    pub fn invert(&self, g: &Automorphism) -> Automorphism {
        Automorphism { depth: g.depth, section: self.invert_section(&g.section, g.depth) }
    }

    /// Applies `s` (rooted at `depth`) to the letters `w_{depth+1}, ...` of `p`.
    pub fn act_section(&self, s: &Section, depth: usize, p: &mut BoundaryPoint) {
        let mut cur = s;
        let mut d = depth;
        loop {
            let i = d + 1;
            match cur {
                Section::Identity => break,
                Section::Perm(perm) => {
                    let w = p.letter(i);
                    p.set_letter(i, perm.apply(w));
                    break;
                }
                Section::Propagating { power, .. } => {
                    if let Some(off) = p.letters().iter().skip(d).position(|&w| w != 0) {
                        let j = d + off + 2;
                        let m = u64::from(self.degree(j));
                        let w = u64::from(p.letter(j));
                        p.set_letter(j, ((w + power) % m) as u32);
                    }
                    break;
                }
                Section::Node(n) => {
                    let w = p.letter(i);
                    p.set_letter(i, n.perm.apply(w));
                    cur = &n.children[w as usize];
                    d += 1;
                }
            }
        }
    }

    pub fn act(&self, g: &Automorphism, p: &BoundaryPoint) -> Result<BoundaryPoint> {
        if g.depth != 0 {
            return Err(Error::LevelMismatch { expected: 0, found: g.depth });
        }
        p.validate(&self.seq)?;
        let mut out = p.clone();
        self.act_section(&g.section, 0, &mut out);
        Ok(out)
    }

    /// Image of the level-`vertex.len()` vertex `vertex` (letters `w_1..`).
    pub fn act_vertex(&self, g: &Automorphism, vertex: &[u32]) -> Vec<u32> {
        let mut p = BoundaryPoint::from_letters(vertex.to_vec());
        self.act_section(&g.section, g.depth, &mut p);
        p.prefix(vertex.len())
    }

    /// Section of `g` at the vertex `vertex`.
    pub fn section_at(&self, g: &Automorphism, vertex: &[u32]) -> Section {
        let mut s = g.section.clone();
        for (k, &w) in vertex.iter().enumerate() {
            let depth = g.depth + k;
            s = match &s {
                Section::Identity => return Section::Identity,
                Section::Perm(_) => return Section::Identity,
                Section::Propagating { .. } | Section::Node(_) => self.expand(&s, depth).1[w as usize].clone(),
            };
        }
        s
    }

    /// Images of every vertex up to `depth`, in breadth-first lexicographic
    /// order: an action fingerprint used to compare elements.
    pub fn action_signature(&self, g: &Automorphism, depth: usize) -> Vec<u32> {
        let mut out = Vec::new();
        let mut level: Vec<Vec<u32>> = vec![Vec::new()];
        for d in 0..depth {
            let m = self.degree(g.depth + d + 1);
            let mut next = Vec::with_capacity(level.len() * m as usize);
            for v in &level {
                for x in 0..m {
                    let mut child = v.clone();
                    child.push(x);
                    out.extend(self.act_vertex(g, &child));
                    next.push(child);
                }
            }
            level = next;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::binary;

    fn pt(letters: &[u32]) -> BoundaryPoint {
        BoundaryPoint::from_letters(letters.to_vec())
    }

    #[test]
    fn root_permutation_moves_first_letter() {
        let g = MotherGroup::new(binary().clone());
        let s = g.root_perm(Perm::from_images(vec![1, 0]).unwrap()).unwrap();
        assert_eq!(g.act(&s, &BoundaryPoint::origin()).unwrap(), pt(&[1]));
        assert!(g.root_perm(Perm::identity(3)).is_err());
    }

    #[test]
    fn propagating_fixes_origin() {
        let g = MotherGroup::new(DegreeSequence::from_head(vec![3, 2, 4]).unwrap());
        for k in 0..12 {
            assert!(g.act(&g.propagating(k), &BoundaryPoint::origin()).unwrap().is_origin());
        }
    }

    #[test]
    fn propagating_example() {
        // a = <a_2, s_2> on m = 2: w_1 = 1 sends w_2 through s_2.
        let g = MotherGroup::new(binary().clone());
        let a = g.propagating(1);
        assert_eq!(g.act(&a, &pt(&[1])).unwrap(), pt(&[1, 1]));
        assert_eq!(g.act(&a, &pt(&[0, 0, 1])).unwrap(), pt(&[0, 0, 1, 1]));
        assert_eq!(g.act(&a, &pt(&[0, 1, 1])).unwrap(), pt(&[0, 1]));
    }

    #[test]
    fn propagating_square_is_identity_on_binary_tree() {
        let g = MotherGroup::new(binary().clone());
        let a = g.propagating(1);
        assert_eq!(g.h_order(), 2);
        assert_eq!(g.compose(&a, &a).unwrap(), g.identity());
    }

    #[test]
    fn expansion_collapses() {
        let g = MotherGroup::new(DegreeSequence::from_head(vec![2, 3, 2, 4]).unwrap());
        for k in 1..12 {
            let s = g.propagating_section(1, k);
            let (p, c) = g.expand(&s, 0);
            assert_eq!(g.make_node(0, p, c), s, "k = {k}");
        }
    }

    #[test]
    fn perms_compose_to_perm() {
        let g = MotherGroup::new(DegreeSequence::constant(3).unwrap());
        let s = Perm::from_images(vec![1, 2, 0]).unwrap();
        let t = Perm::from_images(vec![0, 2, 1]).unwrap();
        let st = g.compose(&g.root_perm(s.clone()).unwrap(), &g.root_perm(t.clone()).unwrap()).unwrap();
        assert_eq!(st, g.root_perm(s.then(&t)).unwrap());
    }

    #[test]
    fn level_mismatch_is_reported() {
        let g = MotherGroup::new(binary().clone());
        let deep = g.at_depth(1, g.propagating_section(2, 1)).unwrap();
        assert!(g.compose(&g.identity(), &deep).is_err());
        assert!(g.at_depth(0, g.propagating_section(2, 1)).is_err());
        assert!(g.act(&g.identity(), &pt(&[2])).is_err());
    }

    #[test]
    fn section_lookup() {
        let g = MotherGroup::new(binary().clone());
        let a = g.propagating(1);
        assert_eq!(g.section_at(&a, &[0]), g.propagating_section(2, 1));
        assert!(matches!(g.section_at(&a, &[1]), Section::Perm(_)));
        assert_eq!(g.section_at(&a, &[1, 0]), Section::Identity);
    }
}
