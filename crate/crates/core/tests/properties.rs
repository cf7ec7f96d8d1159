use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::Rng;

use pmg_core::automaton::{inverted_orbit, sample_step, BoundaryPoint, MotherGroup, RayTree, WalkWord};
use pmg_core::chain::ReturnTail;
use pmg_core::gray::{gray_bits, gray_position};
use pmg_core::rng::seeded_rng;
use pmg_core::scalar::ratio_to_f64;
use pmg_core::wreath::{srw_mean_abs, sws_walk, BinaryLamps, IntegerLamps, LampGroup};
use pmg_core::{DegreeSequence, Extension, ScaleTable};

fn sequence() -> impl Strategy<Value = DegreeSequence> {
    prop::collection::vec(2u32..=5, 1..6).prop_map(|head| DegreeSequence::new(head, Extension::Constant).unwrap())
}

fn point(seq: &DegreeSequence, letters: &[u32]) -> BoundaryPoint {
    let letters = letters.iter().enumerate().map(|(i, &w)| w % seq.degree(i + 1)).collect();
    BoundaryPoint::checked(letters, seq).unwrap()
}

/// Every switch adds one, so a lamp reads its own switch count.
#[derive(Clone, Copy)]
struct CountingLamps;

impl LampGroup for CountingLamps {
    type Element = i64;
    fn name(&self) -> &'static str {
        "count"
    }
    fn identity(&self) -> i64 {
        0
    }
    fn sample_switch<R: Rng + ?Sized>(&self, _rng: &mut R) -> i64 {
        1
    }
    fn compose(&self, a: &i64, b: &i64) -> i64 {
        a + b
    }
    fn inverse(&self, a: &i64) -> i64 {
        -a
    }
    fn length(&self, a: &i64) -> u64 {
        a.unsigned_abs()
    }
    fn lambda_lower(&self, t: f64) -> f64 {
        t
    }
    fn lambda_upper(&self, t: f64) -> f64 {
        t
    }
    fn step_entropy(&self) -> f64 {
        0.0
    }
    fn entropy(&self, _t: f64) -> f64 {
        0.0
    }
}

/// `P(|S_k| = j)` by repeated convolution.
fn srw_mean_abs_oracle(k: usize) -> f64 {
    let mut dist = vec![1.0f64];
    for _ in 0..k {
        let mut next = vec![0.0; dist.len() + 2];
        for (i, p) in dist.iter().enumerate() {
            next[i] += p / 2.0;
            next[i + 2] += p / 2.0;
        }
        dist = next;
    }
    dist.iter().enumerate().map(|(i, p)| p * (i as f64 - k as f64).abs()).sum()
}

#[test]
fn srw_table_matches_convolution() {
    for k in 0..=64 {
        let oracle = srw_mean_abs_oracle(k);
        assert!((srw_mean_abs(k as u64) - oracle).abs() <= 1e-12 * oracle.max(1.0), "k={k}");
    }
}

#[test]
fn first_letter_is_chi_square_uniform_mix() {
    // One step from o: a root permutation (probability 1/2) sends o to a
    // uniform letter, a propagating power fixes o.
    for m in [2u32, 3, 5] {
        let group = MotherGroup::new(DegreeSequence::constant(m).unwrap());
        let mut rng = seeded_rng(u64::from(m));
        let trials = 200_000usize;
        let mut counts = vec![0usize; m as usize];
        for _ in 0..trials {
            let mut p = BoundaryPoint::origin();
            sample_step(&group, &mut rng).act_point(group.sequence(), &mut p);
            counts[p.letter(1) as usize] += 1;
        }
        let mf = f64::from(m);
        let chi2: f64 = counts
            .iter()
            .enumerate()
            .map(|(w, &c)| {
                let p = if w == 0 { 0.5 + 0.5 / mf } else { 0.5 / mf };
                let e = p * trials as f64;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        // 0.999 quantiles of chi-square with 1, 2, 4 degrees of freedom
        let critical = [10.83, 13.82, 18.47][[2, 3, 5].iter().position(|&d| d == m).unwrap()];
        assert!(chi2 < critical, "m={m}: chi2 = {chi2}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn action_is_a_right_action(seq in sequence(), s1 in any::<u64>(), s2 in any::<u64>(),
                                len1 in 0usize..12, len2 in 0usize..12,
                                letters in prop::collection::vec(0u32..5, 0..8)) {
        let group = MotherGroup::new(seq.clone());
        let g = WalkWord::sample(&group, len1, s1).evaluate(&group);
        let h = WalkWord::sample(&group, len2, s2).evaluate(&group);
        let p = point(&seq, &letters);
        let gh = group.compose(&g, &h).unwrap();
        let lhs = group.act(&gh, &p).unwrap();
        let rhs = group.act(&h, &group.act(&g, &p).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_undoes(seq in sequence(), s in any::<u64>(), len in 0usize..16,
                      letters in prop::collection::vec(0u32..5, 0..8)) {
        let group = MotherGroup::new(seq.clone());
        let g = WalkWord::sample(&group, len, s).evaluate(&group);
        let inv = group.invert(&g);
        prop_assert!(group.compose(&g, &inv).unwrap().section().is_identity());
        prop_assert!(group.compose(&inv, &g).unwrap().section().is_identity());
        let p = point(&seq, &letters);
        prop_assert_eq!(group.act(&inv, &group.act(&g, &p).unwrap()).unwrap(), p);
    }

    #[test]
    fn scale_sandwich(seq in sequence(), n in 1.0f64..1e12) {
        let mut table = ScaleTable::new(seq.clone());
        let l = table.level(n).unwrap();
        let n_l = ratio_to_f64(&seq.scale(l));
        let rel = 1e-12 * n;
        prop_assert!(n <= n_l + rel, "n={} n_l={}", n, n_l);
        prop_assert!(n_l <= 2.0 * f64::from(seq.m_star()) * n + rel);
        if l > 0 {
            prop_assert!(ratio_to_f64(&seq.scale(l - 1)) < n + rel);
        }
    }

    #[test]
    fn gray_round_trip(level in 1usize..=63, raw in any::<u64>()) {
        let p = raw >> (64 - level);
        let b = gray_bits(p, level).unwrap();
        prop_assert_eq!(gray_position(b), p);
        if p > 0 {
            let q = gray_bits(p - 1, level).unwrap();
            prop_assert_eq!((b.raw() ^ q.raw()).count_ones(), 1);
        }
    }

    #[test]
    fn lambda_profiles_monotone_subadditive(s in 0.0f64..5000.0, t in 0.0f64..5000.0) {
        fn check<L: LampGroup>(lamps: &L, s: f64, t: f64) -> Result<(), TestCaseError> {
            for lam in [|l: &L, x: f64| l.lambda_lower(x), |l: &L, x: f64| l.lambda_upper(x)] {
                let (a, b) = (lam(lamps, s), lam(lamps, t));
                let (lo, hi) = if s <= t { (a, b) } else { (b, a) };
                prop_assert!(lo <= hi + 1e-12);
                prop_assert!(lam(lamps, s + t) <= a + b + 1e-9);
            }
            prop_assert!(lamps.lambda_lower(s) >= lamps.lambda_upper(s) - 1e-12);
            Ok(())
        }
        check(&IntegerLamps, s, t)?;
        check(&BinaryLamps, s, t)?;
    }

    #[test]
    fn srw_bracket(k in 1u64..1_000_000) {
        let e = srw_mean_abs(k);
        let kf = k as f64;
        prop_assert!(2.0 / std::f64::consts::PI * kf.sqrt() <= e);
        prop_assert!(e <= kf.sqrt() * (1.0 + 1e-12));
    }

    #[test]
    fn pruned_tree_bound(seq in sequence(), seed in any::<u64>(), len in 1usize..400) {
        let group = MotherGroup::new(seq);
        let word = WalkWord::sample(&group, len, seed);
        let tree = RayTree::build(&inverted_orbit(&group, &word).points);
        prop_assert!(tree.pruned_bound_holds());
        prop_assert!(tree.pruned().len() <= 3 * tree.rays());
    }

    #[test]
    fn switch_counts(seq in sequence(), seed in any::<u64>(), n in 0usize..300) {
        let group = MotherGroup::new(seq);
        let out = sws_walk(&group, &CountingLamps, n, &mut seeded_rng(seed));
        let last = out.points.last().unwrap();
        let mut total = 0u64;
        for (s, _) in out.occupation.iter() {
            let expected = out.occupation.switch_count(s, last);
            prop_assert_eq!(out.config.get(s).copied().unwrap_or(0) as u64, expected);
            total += expected;
        }
        prop_assert_eq!(total, 2 * n as u64);
    }

    #[test]
    fn float_tail_tracks_exact(seq in sequence(), horizon in 1usize..60) {
        let exact = ReturnTail::<BigRational>::compute(&seq, horizon).unwrap();
        let float = ReturnTail::<f64>::compute(&seq, horizon).unwrap();
        for (e, f) in exact.values().iter().zip(float.values()) {
            let e = e.to_f64().unwrap();
            prop_assert!((e - f).abs() <= 1e-12 * e.max(1e-300));
        }
        let q = exact.orbit_size(horizon).unwrap().to_f64().unwrap();
        prop_assert!(q >= 1.0 && q <= horizon as f64 + 1.0);
    }
}
