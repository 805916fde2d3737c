use std::collections::BTreeMap;
use std::io::Write;
use std::str::FromStr;

use super::{EpsLevel, TrialRecord};
use crate::error::{Error, Result};
use crate::model::BundleVariant;

/// Number of log-spaced τ values in a profile grid.
pub const TAU_POINTS: usize = 100;
/// Floor applied to wall times so zero-duration runs still yield finite ratios.
const TIME_FLOOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Time,
    Iterations,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "time" => Ok(Metric::Time),
            "iters" | "iterations" => Ok(Metric::Iterations),
            other => Err(Error::InvalidParameter(format!("unknown metric '{other}'"))),
        }
    }
}

impl Metric {
    fn of(self, r: &TrialRecord) -> f64 {
        match self {
            Metric::Time => r.wall_time.max(TIME_FLOOR),
            Metric::Iterations => r.iterations as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileTable {
    pub metric: Metric,
    pub solvers: Vec<BundleVariant>,
    /// Increasing, starting at 1 and ending at the largest finite ratio.
    pub tau: Vec<f64>,
    /// `rho[s][t]`: fraction of problems solver `s` solved within `tau[t]` of the best.
    pub rho: Vec<Vec<f64>>,
    /// `ratios[s][p]`, `+∞` when unsolved.
    pub ratios: Vec<Vec<f64>>,
}

impl ProfileTable {
    pub fn problem_count(&self) -> usize {
        self.ratios.first().map_or(0, Vec::len)
    }

    /// `ρ_s(τ)` evaluated exactly from the stored ratios.
    pub fn rho_at(&self, solver: usize, tau: f64) -> f64 {
        let ratios = &self.ratios[solver];
        ratios.iter().filter(|&&r| r.is_finite() && r <= tau).count() as f64 / ratios.len() as f64
    }

    pub fn solved_fraction(&self, solver: usize) -> f64 {
        self.rho_at(solver, f64::INFINITY)
    }
}

/// Dolan–Moré profile with one solver per bundle variant and one problem per
/// `(problem id, ε level)`. A variant missing a record for a problem counts as
/// unsolved there.
pub fn performance_profile(records: &[TrialRecord], metric: Metric) -> Result<ProfileTable> {
    if records.is_empty() {
        return Err(Error::InvalidParameter("no records to profile".into()));
    }
    let solvers: Vec<BundleVariant> = BundleVariant::ALL
        .into_iter()
        .filter(|v| records.iter().any(|r| r.variant == *v))
        .collect();
    let mut problems: BTreeMap<(&str, EpsLevel), Vec<Option<f64>>> = BTreeMap::new();
    for r in records {
        let s = solvers.iter().position(|&v| v == r.variant).expect("solver listed");
        let slot = problems
            .entry((r.problem_id.as_str(), r.eps_level))
            .or_insert_with(|| vec![None; solvers.len()]);
        if slot[s].is_some() {
            return Err(Error::InvalidParameter(format!(
                "duplicate record for {} / {} / {:?}",
                r.problem_id, r.variant, r.eps_level
            )));
        }
        slot[s] = Some(if r.solved { metric.of(r) } else { f64::INFINITY });
    }

    let mut ratios = vec![Vec::with_capacity(problems.len()); solvers.len()];
    for costs in problems.values() {
        let costs: Vec<f64> = costs.iter().map(|c| c.unwrap_or(f64::INFINITY)).collect();
        let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
        for (s, &c) in costs.iter().enumerate() {
            let ratio = if !c.is_finite() {
                f64::INFINITY
            } else if c == best {
                1.0
            } else {
                c / best
            };
            ratios[s].push(ratio);
        }
    }

    let tau_max = ratios
        .iter()
        .flatten()
        .copied()
        .filter(|r| r.is_finite())
        .fold(1.0, f64::max);
    let tau = tau_grid(tau_max);
    let mut table = ProfileTable {
        metric,
        solvers,
        tau,
        rho: Vec::new(),
        ratios,
    };
    table.rho = (0..table.solvers.len())
        .map(|s| table.tau.iter().map(|&t| table.rho_at(s, t)).collect())
        .collect();
    Ok(table)
}

fn tau_grid(tau_max: f64) -> Vec<f64> {
    if tau_max <= 1.0 {
        return vec![1.0];
    }
    let top = tau_max.ln();
    let mut grid: Vec<f64> = (0..TAU_POINTS)
        .map(|i| (top * i as f64 / (TAU_POINTS - 1) as f64).exp())
        .collect();
    grid[0] = 1.0;
    grid[TAU_POINTS - 1] = tau_max;
    grid
}

/// Tab-separated table: a `tau` column followed by one column per variant.
pub fn write_profile_tsv<W: Write>(table: &ProfileTable, mut out: W) -> Result<()> {
    write!(out, "tau")?;
    for s in &table.solvers {
        write!(out, "\t{s}")?;
    }
    writeln!(out)?;
    for (t, tau) in table.tau.iter().enumerate() {
        write!(out, "{tau}")?;
        for rho in &table.rho {
            write!(out, "\t{}", rho[t])?;
        }
        writeln!(out)?;
    }
    Ok(())
}
