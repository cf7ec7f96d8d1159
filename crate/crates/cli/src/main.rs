use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use pmg_core::DegreeSequence;

mod commands;

#[derive(Parser)]
#[command(name = "pmg", version, about = "Piecewise mother groups: sequence design, exact chain tables, simulation and bound checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Lamps {
    Z,
    Z2,
}

#[derive(Subcommand)]
enum Command {
    /// Build a degree sequence tracking a target growth function.
    Design {
        #[arg(long)]
        gamma: f64,
        /// `pow:beta` or `pow-log:beta,k`.
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 40)]
        levels: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Exact return-time tail of the assembly-line chain.
    Chain {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run every chain inequality check; exit nonzero on a violation.
        #[arg(long)]
        verify: bool,
    },
    /// Monte Carlo runs of the group walk or the switch-walk-switch walk.
    Simulate {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, default_value_t = 1000)]
        replicas: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Steps per replica (orbit statistics).
        #[arg(long, required_unless_present = "wreath")]
        steps: Option<usize>,
        /// Comma-separated subset of `orbit,raytree`.
        #[arg(long, default_value = "orbit")]
        stats: String,
        /// Simulate the switch-walk-switch walk instead.
        #[arg(long)]
        wreath: bool,
        #[arg(long, value_enum, default_value = "z")]
        lamps: Lamps,
        /// `2^a:2^b` or a comma-separated list.
        #[arg(long, default_value = "2^8:2^16")]
        grid: String,
    },
    /// Exact-input bound checks; exit nonzero if any fails.
    Verify {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, default_value = "2^8:2^16")]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Return sandwich is checked at every n up to this (default: largest grid point).
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long, default_value_t = 10)]
        return_levels: usize,
        #[arg(long, default_value_t = 8)]
        hitting_levels: usize,
        #[arg(long, default_value_t = 12)]
        resistance_levels: usize,
    },
}

pub fn read_sequence(path: &Path) -> Result<DegreeSequence> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// `2^a:2^b` (dyadic range) or `n1,n2,...`.
pub fn parse_grid(spec: &str) -> Result<Vec<usize>> {
    let pow = |s: &str| -> Result<usize> {
        let s = s.trim();
        match s.split_once('^') {
            Some((b, e)) => {
                let (b, e): (usize, u32) = (b.parse()?, e.parse()?);
                b.checked_pow(e).context("grid point overflows")
            }
            None => Ok(s.parse()?),
        }
    };
    let grid: Vec<usize> = if let Some((a, b)) = spec.split_once(':') {
        let (a, b) = (pow(a)?, pow(b)?);
        if a == 0 || b < a {
            bail!("bad grid range {spec}");
        }
        std::iter::successors(Some(a), |&x| (x * 2 <= b).then_some(x * 2)).collect()
    } else {
        spec.split(',').map(pow).collect::<Result<_>>()?
    };
    if grid.is_empty() || grid.contains(&0) {
        bail!("grid must contain positive integers");
    }
    Ok(grid)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Design { gamma, target, levels, out, report } => {
            commands::design(gamma, &target, levels, &out, report.as_deref())
        }
        Command::Chain { seq, horizon, out, verify } => commands::chain(&seq, horizon, out.as_deref(), verify),
        Command::Simulate { seq, replicas, seed, out, steps, stats, wreath, lamps, grid } => {
            if wreath {
                parse_grid(&grid)
                    .and_then(|g| commands::simulate_wreath(&seq, lamps, &g, replicas, seed, out.as_deref()))
            } else {
                commands::simulate_orbit(&seq, steps.unwrap_or(0), replicas, seed, &stats, out.as_deref())
            }
        }
        Command::Verify { seq, grid, out, horizon, return_levels, hitting_levels, resistance_levels } => {
            parse_grid(&grid).and_then(|g| {
                let horizon = horizon.unwrap_or_else(|| g.iter().copied().max().unwrap_or(1));
                let levels = pmg_core::verify::SuiteLevels {
                    return_time: return_levels,
                    hitting: hitting_levels,
                    resistance: resistance_levels,
                    horizon,
                };
                commands::verify(&seq, &g, levels, out.as_deref())
            })
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
