use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use pmg_core::automaton::{InvertedWalker, MotherGroup, RayTree};
use pmg_core::automaton::{sample_step, OccupationMeasure};
use pmg_core::bounds::{thm_4_1_lower, thm_6_5_bracket};
use pmg_core::chain::{check_return_bounds, return_bound_rows, ReturnTail};
use pmg_core::designer::{default_lipschitz_grid, design_sequence, validate_log_lipschitz, TargetFunction};
use pmg_core::report::{BoundCheck, ExperimentReport};
use pmg_core::rng::run_replicas;
use pmg_core::verify::{exact_suite, hitting_checks, not_small_checks, resistance_checks, return_time_checks, SuiteLevels};
use pmg_core::wreath::{mean_stderr, speed_experiment, LampGroup};
use pmg_core::{BinaryLamps, IntegerLamps, ScaleTable};
use serde::Serialize;

use crate::{read_sequence, Lamps};

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn csv_writer(path: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(std::io::stdout()),
    };
    Ok(csv::Writer::from_writer(sink))
}

fn summarize(checks: &[BoundCheck]) -> bool {
    let failed: Vec<_> = checks.iter().filter(|c| !c.pass).collect();
    for c in &failed {
        eprintln!("{c}");
    }
    eprintln!("{} checks, {} failed", checks.len(), failed.len());
    failed.is_empty()
}

#[derive(Serialize)]
struct DesignReport<'a> {
    lipschitz: &'a pmg_core::designer::LipschitzReport,
    certificate: &'a pmg_core::DesignCertificate,
    checks: Vec<BoundCheck>,
}

pub fn design(gamma: f64, target: &str, levels: usize, out: &Path, report: Option<&Path>) -> Result<bool> {
    let f = TargetFunction::parse(target, gamma)?;
    let lip = validate_log_lipschitz(&f, &default_lipschitz_grid())?;
    if !lip.pass() {
        if let Some(w) = lip.worst() {
            eprintln!("log-Lipschitz violation at a={} n={}: {} not in [{}, {}]", w.a, w.n, w.value, w.lower, w.upper);
        }
        if !lip.normalized {
            eprintln!("target is not normalized: f(1) != 1");
        }
        bail!("{target} is not log-Lipschitz with exponents [1/2, {gamma}]");
    }
    let (seq, cert) = design_sequence(&f, levels)?;
    write_json(out, &seq)?;
    let checks = cert.checks();
    let ok = summarize(&checks);
    if let Some(path) = report {
        write_json(path, &DesignReport { lipschitz: &lip, certificate: &cert, checks })?;
    }
    println!("m_star = {}, head = {:?}", cert.m_star, seq.head());
    Ok(ok)
}

#[derive(Serialize)]
struct TailRow {
    i: usize,
    #[serde(rename = "P_T_gt_i")]
    p_t_gt_i: f64,
    partial_sum: f64,
    alpha_n: f64,
    lower_bound: f64,
    upper_bound: f64,
    margin_low: f64,
    margin_high: f64,
}

pub fn chain(seq_path: &Path, horizon: usize, out: Option<&Path>, verify: bool) -> Result<bool> {
    let seq = read_sequence(seq_path)?;
    let tail = ReturnTail::<f64>::compute(&seq, horizon)?;
    let grid: Vec<usize> = (1..=horizon).collect();
    if out.is_some() || !verify {
        let mut w = csv_writer(out)?;
        for r in return_bound_rows(&seq, &tail, &grid)? {
            w.serialize(TailRow {
                i: r.n,
                p_t_gt_i: r.tail,
                partial_sum: r.partial_sum,
                alpha_n: r.alpha,
                lower_bound: r.lower_bound,
                upper_bound: r.upper_bound,
                margin_low: r.margin_low(),
                margin_high: r.margin_high(),
            })?;
        }
        w.flush()?;
    }
    if !verify {
        return Ok(true);
    }
    let levels = SuiteLevels::default();
    let mut checks = check_return_bounds(&seq, &tail, &grid)?;
    checks.extend(return_time_checks(&seq, levels.return_time)?);
    checks.extend(hitting_checks(&seq, levels.hitting)?);
    checks.extend(resistance_checks(&seq, levels.resistance)?);
    checks.extend(not_small_checks(&seq, levels.hitting)?);
    Ok(summarize(&checks))
}

#[derive(Serialize)]
struct OrbitRow {
    replica: u64,
    steps: usize,
    orbit_size: usize,
    rays: Option<usize>,
    pruned_vertices: Option<usize>,
    minimal_vertices: Option<usize>,
    pruned_bound_ok: Option<bool>,
    lone_child_ok: Option<bool>,
}

pub fn simulate_orbit(
    seq_path: &Path,
    steps: usize,
    replicas: u64,
    seed: u64,
    stats: &str,
    out: Option<&Path>,
) -> Result<bool> {
    let seq = read_sequence(seq_path)?;
    let mut raytree = false;
    for s in stats.split(',').map(str::trim) {
        match s {
            "orbit" => {}
            "raytree" => raytree = true,
            other => bail!("unknown statistic {other}"),
        }
    }
    let group = MotherGroup::new(seq.clone());
    let rows = run_replicas(seed, replicas, |replica, rng| {
        let mut walker = InvertedWalker::new(&group);
        let mut occupation = OccupationMeasure::new();
        let mut points = Vec::new();
        occupation.record(walker.point());
        if raytree {
            points.push(walker.point().clone());
        }
        for _ in 0..steps {
            let g = sample_step(&group, rng);
            let p = walker.step(&g);
            occupation.record(p);
            if raytree {
                points.push(p.clone());
            }
        }
        let tree = raytree.then(|| RayTree::build(&points));
        OrbitRow {
            replica,
            steps,
            orbit_size: occupation.support_size(),
            rays: tree.as_ref().map(RayTree::rays),
            pruned_vertices: tree.as_ref().map(|t| t.pruned().len()),
            minimal_vertices: tree.as_ref().map(|t| t.minimal(&seq).len()),
            pruned_bound_ok: tree.as_ref().map(RayTree::pruned_bound_holds),
            lone_child_ok: tree.as_ref().map(RayTree::lone_children_end_in_zero_rays),
        }
    });
    let mut w = csv_writer(out)?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    let (mean, se) = mean_stderr(rows.iter().map(|r| r.orbit_size as f64));
    let exact = ReturnTail::<f64>::compute(&seq, steps)?.orbit_size(steps).copied()?;
    eprintln!("E|Q_{steps}|: simulated {mean:.6} +- {se:.6}, exact {exact:.6}");
    let ok = rows.iter().all(|r| r.pruned_bound_ok != Some(false) && r.lone_child_ok != Some(false));
    Ok(ok)
}

#[derive(Serialize)]
struct SpeedCsvRow {
    n: usize,
    replicas: u64,
    mean_lamp_length: f64,
    stderr: f64,
    mean_theoretical_stat: f64,
    mean_orbit_size: f64,
    exact_orbit_size: f64,
    thm41_lower: f64,
    thm65_lower: f64,
    thm65_upper: f64,
}

fn wreath_rows<L: LampGroup>(
    seq: &pmg_core::DegreeSequence,
    lamps: &L,
    grid: &[usize],
    replicas: u64,
    seed: u64,
) -> Result<Vec<SpeedCsvRow>> {
    let group = MotherGroup::new(seq.clone());
    let rows = speed_experiment(&group, lamps, grid, replicas, seed)?;
    let top = grid.iter().copied().max().unwrap_or(1);
    let tail = ReturnTail::<f64>::compute(seq, top)?;
    let mut table = ScaleTable::new(seq.clone());
    let lo = |t: f64| lamps.lambda_lower(t);
    let hi = |t: f64| lamps.lambda_upper(t);
    rows.into_iter()
        .map(|r| {
            let p = *tail.prob_greater(r.n)?;
            let b = thm_6_5_bracket(&mut table, r.n as f64, lo, hi)?;
            Ok(SpeedCsvRow {
                n: r.n,
                replicas: r.replicas,
                mean_lamp_length: r.mean_lamp_length,
                stderr: r.stderr,
                mean_theoretical_stat: r.mean_theoretical,
                mean_orbit_size: r.mean_orbit_size,
                exact_orbit_size: *tail.orbit_size(r.n)?,
                thm41_lower: thm_4_1_lower(r.n as f64, p, lo)?,
                thm65_lower: b.lower,
                thm65_upper: b.upper,
            })
        })
        .collect()
}

pub fn simulate_wreath(
    seq_path: &Path,
    lamps: Lamps,
    grid: &[usize],
    replicas: u64,
    seed: u64,
    out: Option<&Path>,
) -> Result<bool> {
    let seq = read_sequence(seq_path)?;
    let rows = match lamps {
        Lamps::Z => wreath_rows(&seq, &IntegerLamps, grid, replicas, seed)?,
        Lamps::Z2 => wreath_rows(&seq, &BinaryLamps, grid, replicas, seed)?,
    };
    let mut w = csv_writer(out)?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(true)
}

pub fn verify(seq_path: &Path, grid: &[usize], levels: SuiteLevels, out: Option<&Path>) -> Result<bool> {
    let seq = read_sequence(seq_path)?;
    let report: ExperimentReport = exact_suite(&seq, grid, levels)?;
    if let Some(path) = out {
        write_json(path, &report)?;
    }
    Ok(summarize(&report.checks))
}
