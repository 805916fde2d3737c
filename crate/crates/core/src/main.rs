use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tiltprox::bench::{
    generate_grid, performance_profile, read_records, run_trials_detailed, summarize, write_profile_tsv,
    write_records, DimensionSpec, EpsLevel, GridConfig, GridPreset, Metric, OracleKind,
};
use tiltprox::model::BundleVariant;
use tiltprox::oracles::{BallNoiseOracle, ExactOracle, Oracle, PiecewiseSmooth, SimplexGradientOracle};
use tiltprox::problems::{read_problem, write_problem, MaxQuadProblem, TestFunction};
use tiltprox::rng::RngState;
use tiltprox::solver::{check_trace, run, SolveResult, SolverConfig};
use tiltprox::Vector;

const EXIT_USAGE: u8 = 1;
const EXIT_SOLVE_FAILURE: u8 = 2;
const EXIT_INVARIANT: u8 = 3;

#[derive(Parser)]
#[command(name = "tiltprox", version, about = "Proximal points from exact values and inexact subgradients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the prox of one problem file or named test function.
    Solve(SolveArgs),
    /// Write generated max-of-quadratics problems as JSON files.
    Generate(GenerateArgs),
    /// Run a trial grid and write results.csv.
    Bench(BenchArgs),
    /// Build a performance profile from results.csv.
    Profile(ProfileArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Problem file written by `generate`.
    #[arg(long, conflicts_with = "function", required_unless_present = "function")]
    problem: Option<PathBuf>,
    /// Named test function (p_alpha, dem, wong3_adj, cb2, mifflin2, evd52_adj, oet6_adj, maxexp, maxlog, max10).
    #[arg(long)]
    function: Option<String>,
    /// Prox parameter; defaults to the problem's own `r`, or 1.
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    stol: f64,
    /// Subgradient error radius for the ball oracle.
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long, default_value = "full")]
    variant: String,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "ball")]
    oracle: String,
    /// Prox centre as comma-separated values (test functions default to all ones).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    centre: Option<Vec<f64>>,
    /// Verify anchoring and merit monotonicity along the trace.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct GridArgs {
    /// desk, low, high, or full.
    #[arg(long, default_value = "desk")]
    grid: String,
    /// Restrict to these dimensions (dense below 100, sparse from 100).
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Restrict to one state `nf,nf_xstar,nf_z`.
    #[arg(long, value_delimiter = ',')]
    state: Option<Vec<usize>>,
    /// Problems per state.
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, default_value_t = 1)]
    master_seed: u64,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    grid: GridArgs,
    /// Worker threads (0 uses every core).
    #[arg(long, default_value_t = 0)]
    parallel: usize,
    #[arg(long, default_value = "ball")]
    oracle: String,
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
    /// Also write the averages table as CSV.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct ProfileArgs {
    /// time or iters.
    #[arg(long, default_value = "iters")]
    metric: String,
    #[arg(long = "in", default_value = "results.csv")]
    input: PathBuf,
    #[arg(long, default_value = "profile.tsv")]
    out: PathBuf,
}

enum Failure {
    Usage(String),
    Solve(String),
    Invariant(String),
}

impl From<tiltprox::Error> for Failure {
    fn from(e: tiltprox::Error) -> Self {
        Failure::Solve(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Solve(e.to_string())
    }
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Generate(a) => generate(a),
        Command::Bench(a) => bench(a),
        Command::Profile(a) => profile(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Solve(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_SOLVE_FAILURE)
        }
        Err(Failure::Invariant(m)) => {
            eprintln!("invariant violation: {m}");
            ExitCode::from(EXIT_INVARIANT)
        }
    }
}

fn solve(a: SolveArgs) -> Result<(), Failure> {
    let variant: BundleVariant = a.variant.parse().map_err(usage)?;
    let oracle_kind: OracleKind = a.oracle.parse().map_err(usage)?;
    if !(a.eps >= 0.0) {
        return Err(usage("--eps must be nonnegative"));
    }
    let centre = a.centre.clone().map(Vector::from_vec);
    if let Some(path) = &a.problem {
        let problem = read_problem(path)?;
        let z = centre.unwrap_or_else(|| problem.z.clone());
        let r = a.r.unwrap_or(problem.r);
        let result = solve_function(&problem, &a, variant, oracle_kind, z.clone(), r)?;
        report(&a, &result, r)?;
        if z == problem.z && r == problem.r {
            println!("distance to x*: {:e}", (&result.x_out - &problem.x_star).norm());
        }
        Ok(())
    } else {
        let name = a.function.as_deref().expect("clap requires one source");
        let function: TestFunction = name.parse().map_err(usage)?;
        let z = centre.unwrap_or_else(|| function.default_centre());
        let r = a.r.unwrap_or(1.0);
        let result = solve_function(&function, &a, variant, oracle_kind, z, r)?;
        report(&a, &result, r)
    }
}

fn solve_function<P: PiecewiseSmooth>(
    function: P,
    a: &SolveArgs,
    variant: BundleVariant,
    kind: OracleKind,
    z: Vector,
    r: f64,
) -> Result<SolveResult, Failure> {
    let n = function.dimension();
    if z.len() != n {
        return Err(usage(format!("centre has {} entries, problem dimension is {n}", z.len())));
    }
    let mut config = SolverConfig::new(z)
        .prox_param(r)
        .stop_tol(a.stol)
        .variant(variant)
        .eps(a.eps)
        .record_trace(a.check);
    if let Some(cap) = a.max_iter {
        config = config.max_iterations(cap);
    }
    config.validate().map_err(usage)?;
    fn go<O: Oracle>(mut o: O, c: &SolverConfig) -> Result<SolveResult, Failure> {
        Ok(run(&mut o, c)?)
    }
    match kind {
        OracleKind::Exact => go(ExactOracle::new(function), &config),
        OracleKind::Ball => go(
            BallNoiseOracle::new(function, a.eps, RngState::new(a.seed)).map_err(usage)?,
            &config,
        ),
        OracleKind::Simplex => go(SimplexGradientOracle::new(function, None, a.eps), &config),
    }
}

fn report(a: &SolveArgs, result: &SolveResult, r: f64) -> Result<(), Failure> {
    let x: Vec<String> = result.x_out.iter().map(|v| format!("{v:.10e}")).collect();
    println!("stop: {:?}", result.stop_reason);
    println!("iterations: {}", result.iterations);
    println!("tilt corrections: {}", result.tilt_corrections);
    println!("f(x): {:.12e}", result.f_out);
    println!("error bound: {:e}", result.error_bound);
    println!("x: [{}]", x.join(", "));
    if a.check {
        let violations = check_trace(result, r);
        if let Some(first) = violations.first() {
            return Err(Failure::Invariant(format!("{} violation(s), first: {first:?}", violations.len())));
        }
        println!("trace checks: ok");
    }
    if !result.converged() {
        return Err(Failure::Solve(format!(
            "iteration cap reached after {} iterations",
            result.iterations
        )));
    }
    Ok(())
}

fn grid_config(g: &GridArgs) -> Result<GridConfig, Failure> {
    let preset: GridPreset = g.grid.parse().map_err(usage)?;
    let mut config = GridConfig::preset(preset, g.master_seed);
    if let Some(ns) = &g.n {
        let reps = config.dimensions.first().map_or(1, |d| d.repetitions);
        config.dimensions = ns
            .iter()
            .map(|&n| {
                if n >= tiltprox::bench::HIGH_DIMENSION {
                    DimensionSpec::high(n, reps)
                } else {
                    DimensionSpec::low(n, reps)
                }
            })
            .collect();
    }
    if let Some(reps) = g.reps {
        config = config.repetitions(reps);
    }
    if let Some(s) = &g.state {
        if s.len() != 3 {
            return Err(usage(format!("--state takes nf,nf_xstar,nf_z, got {} value(s)", s.len())));
        }
        config.state = Some((s[0], s[1], s[2]));
    }
    config.validate().map_err(usage)?;
    Ok(config)
}

fn generate(a: GenerateArgs) -> Result<(), Failure> {
    let config = grid_config(&a.grid)?;
    let problems: Vec<MaxQuadProblem> = generate_grid(&config)?;
    fs::create_dir_all(&a.out)?;
    for p in &problems {
        write_problem(p, &a.out.join(format!("{}.json", p.id())))?;
    }
    println!("wrote {} problems to {}", problems.len(), a.out.display());
    Ok(())
}

fn bench(a: BenchArgs) -> Result<(), Failure> {
    let oracle: OracleKind = a.oracle.parse().map_err(usage)?;
    let config = grid_config(&a.grid)?.oracle(oracle);
    let report = run_trials_detailed(&config, a.parallel)?;
    for d in &report.diagnostics {
        eprintln!("warning: {d}");
    }
    write_records(&report.records, BufWriter::new(File::create(&a.out)?))?;
    let table = summarize(&report.records)?;
    print!("{table}");
    let zero_eps_violations = report
        .records
        .iter()
        .filter(|r| oracle != OracleKind::Simplex && r.eps_level == EpsLevel::Zero)
        .filter(|r| r.solved && !r.within_bound)
        .count();
    if let Some(path) = &a.summary {
        File::create(path)?.write_all(table.to_csv().as_bytes())?;
    }
    println!("wrote {} records to {}", report.records.len(), a.out.display());
    if zero_eps_violations > 0 {
        return Err(Failure::Invariant(format!(
            "{zero_eps_violations} solved exact-subgradient run(s) ended outside s_tol"
        )));
    }
    Ok(())
}

fn profile(a: ProfileArgs) -> Result<(), Failure> {
    let metric: Metric = a.metric.parse().map_err(usage)?;
    let records = read_records(File::open(&a.input)?)?;
    let table = performance_profile(&records, metric).map_err(usage)?;
    let mut out = BufWriter::new(File::create(&a.out)?);
    write_profile_tsv(&table, &mut out)?;
    out.flush()?;
    for (s, v) in table.solvers.iter().enumerate() {
        println!("{:<14} solved {:>6.1}%", v.as_str(), 100.0 * table.solved_fraction(s));
    }
    println!("wrote {} tau values to {}", table.tau.len(), a.out.display());
    Ok(())
}
