//! Benchmark harness: trial grids over generated max-of-quadratics problems,
//! CSV persistence, performance profiles, and averages tables.
//!
//! Every random draw is seeded from a master seed and the trial's grid
//! coordinates, so results do not depend on scheduling or thread count.

mod profile;
mod records;
mod summary;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use profile::{performance_profile, write_profile_tsv, Metric, ProfileTable};
pub use records::{read_records, records_from_csv, records_to_csv, write_records, TrialRecord};
pub use summary::{summarize, SummaryRow, SummaryTable, HIGH_DIMENSION};

use crate::error::{Error, Result};
use crate::model::BundleVariant;
use crate::oracles::{BallNoiseOracle, ExactOracle, Oracle, SimplexGradientOracle};
use crate::problems::{generate_max_quad, nf_levels, GeneratorParams, MaxQuadProblem};
use crate::rng::{derive_seed, RngState};
use crate::solver::{default_max_iterations, run, SolveResult, SolverConfig};

/// Subgradient error level relative to the stopping tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EpsLevel {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "s_tol")]
    Stol,
    #[serde(rename = "10s_tol")]
    TenStol,
}

impl EpsLevel {
    pub const ALL: [EpsLevel; 3] = [EpsLevel::Zero, EpsLevel::Stol, EpsLevel::TenStol];

    pub fn value(self, s_tol: f64) -> f64 {
        match self {
            EpsLevel::Zero => 0.0,
            EpsLevel::Stol => s_tol,
            EpsLevel::TenStol => 10.0 * s_tol,
        }
    }

    fn ordinal(self) -> u64 {
        self as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    /// Exact gradient of the first active piece.
    Exact,
    /// First active gradient plus a uniform draw from the `ε`-ball.
    Ball,
    /// Forward simplex gradient.
    Simplex,
}

impl FromStr for OracleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(OracleKind::Exact),
            "ball" => Ok(OracleKind::Ball),
            "simplex" => Ok(OracleKind::Simplex),
            other => Err(Error::InvalidParameter(format!("unknown oracle '{other}'"))),
        }
    }
}

/// Preset trial grids.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridPreset {
    /// `n ∈ {4, 10}`, dense, one problem per state.
    Desk,
    /// `n ∈ {4, 10, 25}`, dense, ten problems per state.
    Low,
    /// `n ∈ {100, 200}`, sparse, two problems per state.
    High,
    /// `Low` followed by `High`.
    Full,
}

impl FromStr for GridPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(GridPreset::Desk),
            "low" => Ok(GridPreset::Low),
            "high" => Ok(GridPreset::High),
            "full" => Ok(GridPreset::Full),
            other => Err(Error::InvalidParameter(format!("unknown grid '{other}'"))),
        }
    }
}

/// One dimension of the grid with its storage and iteration-cap class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimensionSpec {
    pub n: usize,
    pub sparse: bool,
    pub repetitions: usize,
    pub high_dimension: bool,
}

impl DimensionSpec {
    pub fn low(n: usize, repetitions: usize) -> Self {
        Self {
            n,
            sparse: false,
            repetitions,
            high_dimension: false,
        }
    }

    pub fn high(n: usize, repetitions: usize) -> Self {
        Self {
            n,
            sparse: true,
            repetitions,
            high_dimension: true,
        }
    }

    pub fn iteration_cap(&self) -> usize {
        default_max_iterations(self.n, self.high_dimension)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridConfig {
    pub dimensions: Vec<DimensionSpec>,
    pub variants: Vec<BundleVariant>,
    pub eps_levels: Vec<EpsLevel>,
    pub oracle: OracleKind,
    pub master_seed: u64,
    pub prox_param: f64,
    pub stop_tol: f64,
    /// Restricts the states to one `(nf, nf_xstar, nf_z)` tuple.
    pub state: Option<(usize, usize, usize)>,
}

impl GridConfig {
    pub fn preset(preset: GridPreset, master_seed: u64) -> Self {
        let dimensions = match preset {
            GridPreset::Desk => vec![DimensionSpec::low(4, 1), DimensionSpec::low(10, 1)],
            GridPreset::Low => [4, 10, 25].map(|n| DimensionSpec::low(n, 10)).to_vec(),
            GridPreset::High => [100, 200].map(|n| DimensionSpec::high(n, 2)).to_vec(),
            GridPreset::Full => {
                let mut d = GridConfig::preset(GridPreset::Low, master_seed).dimensions;
                d.extend(GridConfig::preset(GridPreset::High, master_seed).dimensions);
                d
            }
        };
        Self {
            dimensions,
            variants: BundleVariant::ALL.to_vec(),
            eps_levels: EpsLevel::ALL.to_vec(),
            oracle: OracleKind::Ball,
            master_seed,
            prox_param: 1.0,
            stop_tol: 1e-3,
            state: None,
        }
    }

    /// Overrides the number of problems drawn per state.
    pub fn repetitions(mut self, reps: usize) -> Self {
        for d in &mut self.dimensions {
            d.repetitions = reps;
        }
        self
    }

    pub fn oracle(mut self, oracle: OracleKind) -> Self {
        self.oracle = oracle;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimensions.is_empty() || self.variants.is_empty() || self.eps_levels.is_empty() {
            return Err(Error::InvalidParameter("grid has an empty axis".into()));
        }
        if self.dimensions.iter().any(|d| d.n == 0) {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if !(self.prox_param > 0.0) || !(self.stop_tol >= 0.0) {
            return Err(Error::InvalidParameter("r must be positive and s_tol nonnegative".into()));
        }
        if let Some((nf, x, z)) = self.state {
            if nf == 0 || x == 0 || z == 0 || x > nf || z > nf {
                return Err(Error::InvalidParameter(format!("invalid state ({nf}, {x}, {z})")));
            }
        }
        Ok(())
    }

    /// Every generated problem in canonical order.
    pub fn problems(&self) -> Vec<ProblemSpec> {
        let mut out = Vec::new();
        for dim in &self.dimensions {
            let states: Vec<(usize, usize, usize)> = match self.state {
                Some(s) => vec![s],
                None => grid_states(dim.n),
            };
            for (nf, nf_xstar, nf_z) in states {
                for rep in 0..dim.repetitions {
                    let coords = [dim.n as u64, nf as u64, nf_xstar as u64, nf_z as u64, rep as u64];
                    let mut params =
                        GeneratorParams::new(dim.n, nf, nf_xstar, nf_z, derive_seed(self.master_seed, &coords));
                    params.r = self.prox_param;
                    params.sparse = dim.sparse;
                    out.push(ProblemSpec {
                        params,
                        repetition: rep,
                        iteration_cap: dim.iteration_cap(),
                    });
                }
            }
        }
        out
    }

    /// Number of solver runs the grid will perform.
    pub fn run_count(&self) -> usize {
        self.problems().len() * self.variants.len() * self.eps_levels.len()
    }
}

/// All `(nf, nf_xstar, nf_z)` states with `nf_xstar, nf_z ≤ nf`.
pub fn grid_states(n: usize) -> Vec<(usize, usize, usize)> {
    let levels = nf_levels(n);
    let mut out = Vec::new();
    for &nf in &levels {
        for &x in levels.iter().filter(|&&x| x <= nf) {
            for &z in levels.iter().filter(|&&z| z <= nf) {
                out.push((nf, x, z));
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProblemSpec {
    pub params: GeneratorParams,
    pub repetition: usize,
    pub iteration_cap: usize,
}

impl ProblemSpec {
    /// Identifier used when the problem itself could not be generated.
    pub fn fallback_id(&self) -> String {
        let p = &self.params;
        format!("n{}-nf{}-x{}-z{}-{:016x}", p.n, p.nf, p.nf_xstar, p.nf_z, p.seed)
    }
}

/// Solver settings shared by every run of a batch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSettings {
    pub oracle: OracleKind,
    pub prox_param: f64,
    pub stop_tol: f64,
    pub iteration_cap: usize,
    pub record_trace: bool,
}

/// A finished run with its diagnostic, if it failed.
#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub record: TrialRecord,
    pub result: Option<SolveResult>,
    pub diagnostic: Option<String>,
}

fn oracle_seed(problem_seed: u64, variant: BundleVariant, eps: EpsLevel) -> u64 {
    let v = BundleVariant::ALL.iter().position(|&w| w == variant).unwrap_or(0) as u64;
    derive_seed(problem_seed, &[v, eps.ordinal()])
}

fn solve_with(
    problem: &MaxQuadProblem,
    config: &SolverConfig,
    kind: OracleKind,
    eps: f64,
    seed: u64,
) -> Result<SolveResult> {
    fn go<O: Oracle>(mut oracle: O, config: &SolverConfig) -> Result<SolveResult> {
        run(&mut oracle, config)
    }
    match kind {
        OracleKind::Exact => go(ExactOracle::new(problem), config),
        OracleKind::Ball => go(BallNoiseOracle::new(problem, eps, RngState::new(seed))?, config),
        OracleKind::Simplex => go(
            SimplexGradientOracle::new(problem, None, eps).known_nonconstant(true),
            config,
        ),
    }
}

/// Runs one `(problem, variant, ε)` combination. Panics inside the solver are
/// caught and reported as unsolved.
pub fn run_trial(
    problem: &MaxQuadProblem,
    variant: BundleVariant,
    eps_level: EpsLevel,
    settings: &RunSettings,
) -> TrialOutcome {
    let eps = eps_level.value(settings.stop_tol);
    let mut config = SolverConfig::new(problem.z.clone())
        .prox_param(settings.prox_param)
        .stop_tol(settings.stop_tol)
        .variant(variant)
        .max_iterations(settings.iteration_cap)
        .record_trace(settings.record_trace)
        .eps(eps);
    config.qp_tol = None;
    let seed = oracle_seed(problem.seed, variant, eps_level);
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| {
        solve_with(problem, &config, settings.oracle, eps, seed)
    }));
    let wall_time = start.elapsed().as_secs_f64();
    let mut record = TrialRecord {
        problem_id: problem.id(),
        n: problem.n,
        nf: problem.nf,
        nf_xstar: problem.nf_xstar,
        nf_z: problem.nf_z,
        variant,
        eps_level,
        seed: problem.seed,
        solved: false,
        iterations: 0,
        wall_time,
        final_distance: f64::INFINITY,
        tilt_corrections: 0,
        within_bound: false,
    };
    let bound = settings.stop_tol + eps / settings.prox_param;
    match outcome {
        Ok(Ok(result)) => {
            record.solved = result.converged();
            record.iterations = result.iterations;
            record.final_distance = (&result.x_out - &problem.x_star).norm();
            record.tilt_corrections = result.tilt_corrections;
            record.within_bound = record.final_distance <= bound;
            TrialOutcome {
                record,
                result: Some(result),
                diagnostic: None,
            }
        }
        Ok(Err(e)) => TrialOutcome {
            record,
            result: None,
            diagnostic: Some(format!("solver error: {e}")),
        },
        Err(panic) => TrialOutcome {
            record,
            result: None,
            diagnostic: Some(format!("solver panicked: {}", panic_message(&panic))),
        },
    }
}

fn panic_message(payload: &Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        s.to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "unknown panic".to_string()
    }
}

fn generate_guarded(spec: &ProblemSpec) -> std::result::Result<MaxQuadProblem, String> {
    match catch_unwind(|| generate_max_quad(&spec.params)) {
        Ok(Ok(p)) => Ok(p),
        Ok(Err(e)) => Err(format!("generation failed: {e}")),
        Err(panic) => Err(format!("generation panicked: {}", panic_message(&panic))),
    }
}

/// Records plus one diagnostic line per failed run.
#[derive(Clone, Debug, Default)]
pub struct BatchReport {
    pub records: Vec<TrialRecord>,
    pub diagnostics: Vec<String>,
}

/// Runs the whole grid on `parallelism` threads (`0` uses all cores).
pub fn run_trials(config: &GridConfig, parallelism: usize) -> Result<Vec<TrialRecord>> {
    let report = run_trials_detailed(config, parallelism)?;
    for d in &report.diagnostics {
        log::warn!("{d}");
    }
    Ok(report.records)
}

pub fn run_trials_detailed(config: &GridConfig, parallelism: usize) -> Result<BatchReport> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let specs = config.problems();
    let jobs: Vec<(usize, BundleVariant, EpsLevel)> = (0..specs.len())
        .flat_map(|p| {
            config
                .variants
                .iter()
                .flat_map(move |&v| config.eps_levels.iter().map(move |&e| (p, v, e)))
        })
        .collect();
    let (problems, outcomes) = pool.install(|| {
        let problems: Vec<std::result::Result<MaxQuadProblem, String>> =
            specs.par_iter().map(generate_guarded).collect();
        let outcomes: Vec<(TrialRecord, Option<String>)> = jobs
            .par_iter()
            .map(|&(p, variant, eps_level)| {
                let spec = &specs[p];
                match &problems[p] {
                    Ok(problem) => {
                        let settings = RunSettings {
                            oracle: config.oracle,
                            prox_param: config.prox_param,
                            stop_tol: config.stop_tol,
                            iteration_cap: spec.iteration_cap,
                            record_trace: false,
                        };
                        let out = run_trial(problem, variant, eps_level, &settings);
                        let diag = out.diagnostic.map(|d| format!("{} {variant} {eps_level:?}: {d}", out.record.problem_id));
                        (out.record, diag)
                    }
                    Err(msg) => (
                        failed_record(spec, variant, eps_level),
                        Some(format!("{}: {msg}", spec.fallback_id())),
                    ),
                }
            })
            .collect();
        (problems, outcomes)
    });
    drop(problems);
    let mut report = BatchReport::default();
    for (record, diag) in outcomes {
        report.records.push(record);
        report.diagnostics.extend(diag);
    }
    report.records.sort_by(canonical_order);
    Ok(report)
}

fn failed_record(spec: &ProblemSpec, variant: BundleVariant, eps_level: EpsLevel) -> TrialRecord {
    let p = &spec.params;
    TrialRecord {
        problem_id: spec.fallback_id(),
        n: p.n,
        nf: p.nf,
        nf_xstar: p.nf_xstar,
        nf_z: p.nf_z,
        variant,
        eps_level,
        seed: p.seed,
        solved: false,
        iterations: 0,
        wall_time: 0.0,
        final_distance: f64::INFINITY,
        tilt_corrections: 0,
        within_bound: false,
    }
}

fn variant_rank(v: BundleVariant) -> usize {
    BundleVariant::ALL.iter().position(|&w| w == v).unwrap_or(usize::MAX)
}

/// Sort key: dimension, state, problem id, variant, error level.
pub fn canonical_order(a: &TrialRecord, b: &TrialRecord) -> std::cmp::Ordering {
    (a.n, a.nf, a.nf_xstar, a.nf_z, &a.problem_id, variant_rank(a.variant), a.eps_level).cmp(&(
        b.n,
        b.nf,
        b.nf_xstar,
        b.nf_z,
        &b.problem_id,
        variant_rank(b.variant),
        b.eps_level,
    ))
}

/// Generates every problem of the grid (in canonical order).
pub fn generate_grid(config: &GridConfig) -> Result<Vec<MaxQuadProblem>> {
    config.validate()?;
    config.problems().par_iter().map(|s| generate_max_quad(&s.params)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_counts() {
        assert_eq!(grid_states(4).len(), 30);
        assert_eq!(grid_states(10).len(), 30);
        assert_eq!(grid_states(1).len(), 1);
        assert_eq!(grid_states(2).len(), 1 + 4);
    }

    #[test]
    fn desk_grid_size() {
        let g = GridConfig::preset(GridPreset::Desk, 1);
        assert_eq!(g.run_count(), 60 * 12);
        let single = GridConfig {
            state: Some((2, 1, 2)),
            ..GridConfig::preset(GridPreset::Desk, 1)
        };
        assert_eq!(single.run_count(), 2 * 12);
    }

    #[test]
    fn seeds_depend_on_coordinates_only() {
        let a = GridConfig::preset(GridPreset::Desk, 7).problems();
        let b = GridConfig {
            state: Some((a[5].params.nf, a[5].params.nf_xstar, a[5].params.nf_z)),
            ..GridConfig::preset(GridPreset::Desk, 7)
        }
        .problems();
        assert_eq!(a[5].params.seed, b[0].params.seed);
    }

    #[test]
    fn eps_levels_scale_with_tolerance() {
        assert_eq!(EpsLevel::Zero.value(1e-3), 0.0);
        assert_eq!(EpsLevel::Stol.value(1e-3), 1e-3);
        assert_eq!(EpsLevel::TenStol.value(1e-3), 1e-2);
    }
}
