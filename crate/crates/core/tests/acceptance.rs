//! Acceptance suite. Runs as a plain binary (`harness = false`) so that every
//! criterion prints exactly one PASS/FAIL line; exits nonzero on any FAIL.

use std::process::ExitCode;
use std::time::Instant;

use pmg_core::automaton::{
    count_small_ray_trees, exhaustive_analysis, inverted_orbit, inverted_orbit_reference, lone_sections_propagating,
    sample_step, AssemblyLine, InvertedWalker, MotherGroup, OccupationMeasure, RayTree, WalkWord,
};
use pmg_core::bounds::{thm_4_1_lower, thm_6_5_bracket};
use pmg_core::chain::{check_return_bounds, ReturnTail};
use pmg_core::designer::{design_sequence, log_grid, validate_log_lipschitz, default_lipschitz_grid, verify_tracking, TargetFunction};
use pmg_core::gray::{gray_bits, gray_position};
use pmg_core::report::BoundCheck;
use pmg_core::rng::run_replicas;
use pmg_core::verify::{dyadic_grid, hitting_checks, not_small_checks, resistance_checks, return_time_checks, wreath_checks};
use pmg_core::wreath::{exponent_regression, mean_stderr, speed_experiment, IntegerLamps, LampGroup};
use pmg_core::{DegreeSequence, ScaleTable};

type Outcome = pmg_core::Result<(bool, String)>;

fn designed() -> DegreeSequence {
    let f = TargetFunction::power(0.6, 0.65).unwrap();
    design_sequence(&f, 40).unwrap().0
}

fn sequences() -> Vec<(&'static str, DegreeSequence)> {
    vec![
        ("m=2", DegreeSequence::constant(2).unwrap()),
        ("m=4", DegreeSequence::constant(4).unwrap()),
        ("designed n^0.6", designed()),
    ]
}

fn tally(checks: &[BoundCheck]) -> (bool, String) {
    let failed: Vec<&BoundCheck> = checks.iter().filter(|c| !c.pass).collect();
    let mut detail = format!("{} checks, {} failed", checks.len(), failed.len());
    if let Some(c) = failed.first() {
        detail += &format!("; first: {c}");
    }
    (failed.is_empty(), detail)
}

fn gray_code() -> Outcome {
    let mut checked = 0u64;
    for level in 0..=16usize {
        let size = 1u64 << level;
        let mut seen = vec![false; size as usize];
        let mut prev: Option<u64> = None;
        for p in 0..size {
            let b = gray_bits(p, level)?;
            let raw = b.raw();
            if raw >= size || seen[raw as usize] || gray_position(b) != p {
                return Ok((false, format!("bijection fails at level {level}, position {p}")));
            }
            seen[raw as usize] = true;
            if let Some(q) = prev {
                if (q ^ raw).count_ones() != 1 {
                    return Ok((false, format!("positions {} and {p} differ in more than one bit", p - 1)));
                }
            }
            prev = Some(raw);
            checked += 1;
        }
    }
    Ok((true, format!("{checked} positions over levels 0..=16")))
}

fn chain_identities() -> Outcome {
    let mut checks = Vec::new();
    for (_, seq) in sequences() {
        checks.extend(return_time_checks(&seq, 10)?);
        checks.extend(hitting_checks(&seq, 8)?);
        checks.extend(resistance_checks(&seq, 12)?);
    }
    Ok(tally(&checks))
}

fn return_sandwich() -> Outcome {
    let horizon = 100_000;
    let grid: Vec<usize> = (1..=horizon).collect();
    let mut checks = Vec::new();
    for (_, seq) in sequences() {
        let tail = ReturnTail::<f64>::compute(&seq, horizon)?;
        checks.extend(check_return_bounds(&seq, &tail, &grid)?);
    }
    Ok(tally(&checks))
}

fn hitting_not_small() -> Outcome {
    let mut checks = Vec::new();
    for (_, seq) in sequences() {
        checks.extend(not_small_checks(&seq, 8)?);
    }
    let worst = checks.iter().map(|c| c.value).fold(f64::INFINITY, f64::min);
    let (ok, detail) = tally(&checks);
    Ok((ok, format!("{detail}; smallest probability {worst:.4} vs 1/31")))
}

fn designer_tracking() -> Outcome {
    let targets = [(0.6, 0.65), (0.75, 0.75), (0.7, 0.75), (0.75, 0.8)];
    let grid = log_grid(2.0, 1e6, 600);
    let mut checks = Vec::new();
    for (beta, gamma) in targets {
        let f = TargetFunction::power(beta, gamma)?;
        let lip = validate_log_lipschitz(&f, &default_lipschitz_grid())?;
        if !lip.pass() {
            return Ok((false, format!("{} fails the log-Lipschitz precondition", f.name())));
        }
        let (seq, cert) = design_sequence(&f, 40)?;
        checks.extend(cert.checks());
        checks.extend(verify_tracking(&seq, &f, &grid)?.checks);
    }
    Ok(tally(&checks))
}

const ORBIT_REPLICAS: u64 = 100_000;

fn orbit_identity() -> Outcome {
    let seq = DegreeSequence::constant(2)?;
    let group = MotherGroup::new(seq.clone());
    let checkpoints = [64usize, 256, 1024];
    let top = 1024;
    let sizes = run_replicas(0x0b17, ORBIT_REPLICAS, |_, rng| {
        let mut walker = InvertedWalker::new(&group);
        let mut occ = OccupationMeasure::new();
        occ.record(walker.point());
        let mut out = [0usize; 3];
        for t in 1..=top {
            let g = sample_step(&group, rng);
            occ.record(walker.step(&g));
            if let Some(i) = checkpoints.iter().position(|&c| c == t) {
                out[i] = occ.support_size();
            }
        }
        out
    });
    let tail = ReturnTail::<f64>::compute(&seq, top)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, &n) in checkpoints.iter().enumerate() {
        let (mean, se) = mean_stderr(sizes.iter().map(|s| s[i] as f64));
        let exact = *tail.orbit_size(n)?;
        let z = (mean - exact) / se;
        ok &= z.abs() <= 4.0;
        parts.push(format!("n={n}: {mean:.4} vs {exact:.4} (z={z:+.2})"));
    }
    Ok((ok, parts.join(", ")))
}

/// Two-sample Kolmogorov-Smirnov statistic.
fn ks_statistic(mut a: Vec<usize>, mut b: Vec<usize>) -> f64 {
    a.sort_unstable();
    b.sort_unstable();
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

fn renewal_gaps() -> Outcome {
    let seq = DegreeSequence::constant(2)?;
    let group = MotherGroup::new(seq.clone());
    let (n, t) = (512usize, 256usize);
    let cap = n - t + 1;
    let gaps = run_replicas(0x6a95, ORBIT_REPLICAS, |_, rng| {
        let mut walker = InvertedWalker::new(&group);
        for _ in 0..t {
            walker.step(&sample_step(&group, rng));
        }
        let at_t = walker.point().clone();
        for s in t + 1..=n {
            if *walker.step(&sample_step(&group, rng)) == at_t {
                return s - t;
            }
        }
        cap
    });
    let returns = run_replicas(0x7e7a, ORBIT_REPLICAS, |_, rng| {
        let mut line = AssemblyLine::new(seq.clone());
        for s in 1..cap {
            if line.step(rng).is_origin() {
                return s;
            }
        }
        cap
    });
    let (n1, n2) = (gaps.len() as f64, returns.len() as f64);
    let critical = 1.628 * ((n1 + n2) / (n1 * n2)).sqrt();
    let d = ks_statistic(gaps, returns);
    Ok((d < critical, format!("D = {d:.5}, 1% critical value {critical:.5}")))
}

fn ray_trees() -> Outcome {
    let seq = DegreeSequence::constant(2)?;
    let group = MotherGroup::new(seq.clone());
    let words = 10_000u64;
    let bad = run_replicas(0x7ee, words, |i, rng| {
        let len = 1usize << (1 + i % 10);
        let word = WalkWord::from_rng(&group, len, rng);
        let orbit = inverted_orbit(&group, &word);
        let tree = RayTree::build(&orbit.points);
        let y = word.evaluate(&group);
        [!tree.pruned_bound_holds(), !tree.lone_children_end_in_zero_rays(), !lone_sections_propagating(&group, &y, &tree)]
    });
    let count = |k: usize| bad.iter().filter(|b| b[k]).count();
    let (pruned, lone, sections) = (count(0), count(1), count(2));
    let mut ok = pruned == 0 && lone == 0 && sections == 0;
    let mut detail = format!("random words: {pruned} pruned-bound, {lone} lone-child, {sections} lone-section violations");
    let m = seq.m_star();
    for len in 1..=4 {
        let rep = exhaustive_analysis(&group, len)?;
        let rows_ok = rep.rows.iter().all(|r| r.trees_within_bound() && r.elements_within_bound());
        let this = rows_ok
            && rep.pruned_violations == 0
            && rep.lone_child_violations == 0
            && rep.lone_section_exceptions == 0
            && rep.portraits_match_signatures
            && rep.h_support_given_size <= rep.support_bound(m)
            && rep.h_element <= rep.element_bound(m);
        ok &= this;
        if len == 4 {
            detail += &format!(
                "; length 4: {} words, H(supp|size) {:.3} <= {:.3}, H(Y) {:.3} <= {:.3}",
                rep.words,
                rep.h_support_given_size,
                rep.support_bound(m),
                rep.h_element,
                rep.element_bound(m)
            );
        }
    }
    let counts = count_small_ray_trees(&seq, 4, 6)?;
    ok &= counts.iter().all(|c| c.within_bound());
    Ok((ok, detail))
}

fn speed_exponent() -> Outcome {
    let seq = DegreeSequence::constant(2)?;
    let group = MotherGroup::new(seq.clone());
    let grid = dyadic_grid(8, 16);
    let lamps = IntegerLamps;
    let rows = speed_experiment(&group, &lamps, &grid, 1000, 0x5eed)?;
    let tail = ReturnTail::<f64>::compute(&seq, 1 << 16)?;
    let mut table = ScaleTable::new(seq);
    let lo = |t: f64| lamps.lambda_lower(t);
    let hi = |t: f64| lamps.lambda_upper(t);
    let mut checks = Vec::new();
    for r in &rows {
        let slack = 4.0 * r.stderr;
        let b = thm_6_5_bracket(&mut table, r.n as f64, lo, hi)?;
        let p = *tail.prob_greater(r.n)?;
        checks.push(
            BoundCheck::new(format!("speed bracket n={}", r.n), r.mean_lamp_length)
                .within(b.lower, b.upper)
                .with_slack(slack),
        );
        checks.push(
            BoundCheck::new(format!("first-return speed bound n={}", r.n), r.mean_lamp_length)
                .at_least(thm_4_1_lower(r.n as f64, p, lo)?)
                .with_slack(slack),
        );
    }
    let series: Vec<_> = rows.iter().map(|r| (r.n as f64, r.mean_lamp_length, r.stderr)).collect();
    let fit = exponent_regression("lamp length", &series)?;
    let slope_ok = (0.70..=0.80).contains(&fit.slope);
    let (ok, detail) = tally(&checks);
    Ok((ok && slope_ok, format!("slope {:.4} [{:.4}, {:.4}]; {detail}", fit.slope, fit.ci_low, fit.ci_high)))
}

fn entropy_exponent() -> Outcome {
    let seq = DegreeSequence::constant(2)?;
    let grid = dyadic_grid(8, 16);
    let tail = ReturnTail::<f64>::compute(&seq, 1 << 16)?;
    let series = grid.iter().map(|&n| Ok((n as f64, *tail.orbit_size(n)?, 0.0))).collect::<pmg_core::Result<Vec<_>>>()?;
    let fit = exponent_regression("exact orbit size", &series)?;
    let slope_ok = (0.45..=0.55).contains(&fit.slope);
    let (ok, detail) = tally(&wreath_checks(&seq, &tail, &grid)?);
    Ok((ok && slope_ok, format!("slope {:.4}; {detail}", fit.slope)))
}

fn engine_equivalence() -> Outcome {
    let group = MotherGroup::new(DegreeSequence::constant(2)?);
    let mismatches = run_replicas(0xe9, 1000, |i, rng| {
        let word = WalkWord::from_rng(&group, 1usize << (1 + i % 12), rng);
        let fast = inverted_orbit(&group, &word);
        let slow = inverted_orbit_reference(&group, &word);
        fast.points != slow.points
    });
    let bad = mismatches.iter().filter(|&&b| b).count();
    Ok((bad == 0, format!("{bad} of 1000 words differ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("gray code bijection and adjacency", gray_code),
        ("exact chain identities", chain_identities),
        ("return-probability sandwich", return_sandwich),
        ("hitting time not small", hitting_not_small),
        ("designer tracking", designer_tracking),
        ("inverted-orbit size identity", orbit_identity),
        ("renewal gap distribution", renewal_gaps),
        ("ray-tree combinatorics", ray_trees),
        ("speed exponent", speed_exponent),
        ("entropy exponent", entropy_exponent),
        ("engine equivalence", engine_equivalence),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!pass);
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("{verdict} {:>2} {name}: {detail} [{:.1}s]", i + 1, start.elapsed().as_secs_f64());
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
