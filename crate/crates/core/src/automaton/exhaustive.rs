//! Exact analysis over all words of a fixed length: ray-tree counts, group
//! elements per ray tree and the entropies of `supp Q_n` and `Y_n`.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::group::{MotherGroup, Section};
use super::perm::Perm;
use super::raytree::{lone_sections_propagating, RayTree, Vertex};
use super::walk::{inverted_orbit, Generator, WalkWord};
use crate::error::{Error, Result};

/// Action depth used to tell group elements apart.
pub const SIGNATURE_DEPTH: usize = 6;

const WORD_LIMIT: u64 = 4_000_000;

/// The support of the step distribution with its weights.
pub fn step_atoms(group: &MotherGroup) -> Vec<(Generator, f64)> {
    let perms = Perm::all(group.degree(1));
    let l = group.h_order();
    let wp = 0.5 / perms.len() as f64;
    let wh = 0.5 / l as f64;
    perms
        .into_iter()
        .map(|p| (Generator::Perm(p), wp))
        .chain((0..l).map(|k| (Generator::Propagating(k), wh)))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RayCountRow {
    pub rays: usize,
    /// Distinct ray trees with `rays` rays.
    pub trees: usize,
    /// `ln (m_* + 1)^{6r}`.
    pub ln_tree_bound: f64,
    /// Largest number of distinct elements sharing one ray tree.
    pub max_elements: usize,
    /// `ln (m_*!)^{3 m_*^2 r}`.
    pub ln_element_bound: f64,
}

impl RayCountRow {
    pub fn trees_within_bound(&self) -> bool {
        (self.trees as f64).ln() <= self.ln_tree_bound + 1e-12
    }

    pub fn elements_within_bound(&self) -> bool {
        (self.max_elements as f64).ln() <= self.ln_element_bound + 1e-12
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExhaustiveReport {
    pub length: usize,
    pub words: u64,
    pub rows: Vec<RayCountRow>,
    pub pruned_violations: u64,
    pub lone_child_violations: u64,
    /// Words where some lone child carries a section of `Y_n` that is not a
    /// propagating power.
    pub lone_section_exceptions: u64,
    /// Distinct elements by portrait and by action signature agree.
    pub portraits_match_signatures: bool,
    pub expected_orbit_size: f64,
    /// `H(supp Q_n | |Q_n|)`.
    pub h_support_given_size: f64,
    pub h_support: f64,
    pub h_size: f64,
    /// `H(Y_n)`, elements told apart by their action.
    pub h_element: f64,
}

impl ExhaustiveReport {
    /// `6 log(m_*+1) E|Q_n|`.
    pub fn support_bound(&self, m_star: u32) -> f64 {
        6.0 * f64::from(m_star + 1).ln() * self.expected_orbit_size
    }

    /// `5 m_*^3 log(m_*) E|Q_n| + log(n+1)`.
    pub fn element_bound(&self, m_star: u32) -> f64 {
        let m = f64::from(m_star);
        5.0 * m.powi(3) * m.ln() * self.expected_orbit_size + ((self.length + 1) as f64).ln()
    }
}

fn entropy<K>(dist: &HashMap<K, f64>) -> f64 {
    dist.values().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum()
}

fn ln_factorial(m: u32) -> f64 {
    (2..=m).map(|i| f64::from(i).ln()).sum()
}

/// Enumerates every word of length `n` over the step atoms.
pub fn exhaustive_analysis(group: &MotherGroup, n: usize) -> Result<ExhaustiveReport> {
    let atoms = step_atoms(group);
    let total = (atoms.len() as u64).checked_pow(n as u32).filter(|&w| w <= WORD_LIMIT);
    let Some(words) = total else {
        return Err(Error::OutOfRange(format!("{}^{n} words exceed the enumeration limit", atoms.len())));
    };
    let m_star = group.sequence().m_star();

    let mut by_tree: HashMap<BTreeSet<Vertex>, (usize, HashSet<Vec<u32>>)> = HashMap::new();
    let mut supports: HashMap<BTreeSet<Vec<u32>>, f64> = HashMap::new();
    let mut sizes: HashMap<usize, f64> = HashMap::new();
    let mut elements: HashMap<Vec<u32>, f64> = HashMap::new();
    let mut portraits: HashSet<Section> = HashSet::new();
    let mut report = ExhaustiveReport {
        length: n,
        words,
        rows: Vec::new(),
        pruned_violations: 0,
        lone_child_violations: 0,
        lone_section_exceptions: 0,
        portraits_match_signatures: true,
        expected_orbit_size: 0.0,
        h_support_given_size: 0.0,
        h_support: 0.0,
        h_size: 0.0,
        h_element: 0.0,
    };

    let mut idx = vec![0usize; n];
    for _ in 0..words {
        let gens: Vec<Generator> = idx.iter().map(|&i| atoms[i].0.clone()).collect();
        let weight: f64 = idx.iter().map(|&i| atoms[i].1).product();
        let word = WalkWord::from_generators(gens);
        let orbit = inverted_orbit(group, &word);
        let tree = RayTree::build(&orbit.points);
        let y = word.evaluate(group);
        let sig = group.action_signature(&y, SIGNATURE_DEPTH);

        report.pruned_violations += u64::from(!tree.pruned_bound_holds());
        report.lone_child_violations += u64::from(!tree.lone_children_end_in_zero_rays());
        report.lone_section_exceptions += u64::from(!lone_sections_propagating(group, &y, &tree));

        let r = tree.rays();
        report.expected_orbit_size += weight * r as f64;
        let support: BTreeSet<Vec<u32>> = orbit.occupation.iter().map(|(p, _)| p.letters().to_vec()).collect();
        *supports.entry(support).or_default() += weight;
        *sizes.entry(r).or_default() += weight;
        *elements.entry(sig.clone()).or_default() += weight;
        portraits.insert(y.into_section());
        by_tree.entry(tree.pruned()).or_insert_with(|| (r, HashSet::new())).1.insert(sig);

        for slot in idx.iter_mut().rev() {
            *slot += 1;
            if *slot < atoms.len() {
                break;
            }
            *slot = 0;
        }
    }

    report.portraits_match_signatures = portraits.len() == elements.len();
    report.h_support = entropy(&supports);
    report.h_size = entropy(&sizes);
    // the size is a function of the support
    report.h_support_given_size = report.h_support - report.h_size;
    report.h_element = entropy(&elements);

    let max_r = by_tree.values().map(|(r, _)| *r).max().unwrap_or(0);
    let ln_base = f64::from(m_star + 1).ln();
    let ln_elem = 3.0 * f64::from(m_star).powi(2) * ln_factorial(m_star);
    for r in 1..=max_r {
        let trees: Vec<_> = by_tree.values().filter(|(rr, _)| *rr == r).collect();
        report.rows.push(RayCountRow {
            rays: r,
            trees: trees.len(),
            ln_tree_bound: 6.0 * r as f64 * ln_base,
            max_elements: trees.iter().map(|(_, e)| e.len()).max().unwrap_or(0),
            ln_element_bound: ln_elem * r as f64,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::binary;

    #[test]
    fn atoms_sum_to_one() {
        let g = MotherGroup::new(binary().clone());
        let atoms = step_atoms(&g);
        assert_eq!(atoms.len(), 4);
        assert!((atoms.iter().map(|a| a.1).sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn length_one() {
        let g = MotherGroup::new(binary().clone());
        let r = exhaustive_analysis(&g, 1).unwrap();
        // |Q_1| = 2 only after the swap
        assert!((r.expected_orbit_size - 1.25).abs() < 1e-12);
        // Y_1 is the identity w.p. 1/2, the swap or a w.p. 1/4 each
        let h = -(0.5f64 * 0.5f64.ln() + 0.5 * 0.25f64.ln());
        assert!((r.h_element - h).abs() < 1e-12);
        assert!(r.portraits_match_signatures);
    }

    #[test]
    fn small_words_respect_counting_bounds() {
        let g = MotherGroup::new(binary().clone());
        let r = exhaustive_analysis(&g, 4).unwrap();
        assert_eq!(r.pruned_violations, 0);
        assert_eq!(r.lone_child_violations, 0);
        assert!(r.rows.iter().all(|row| row.trees_within_bound() && row.elements_within_bound()));
        assert!(r.h_support_given_size <= r.support_bound(2));
        assert!(r.h_element <= r.element_bound(2));
        eprintln!("{r:?}");
    }
}
