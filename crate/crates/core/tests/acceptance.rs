//! Acceptance suite: prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::process::ExitCode;

use tiltprox::bench::{performance_profile, run_trial, EpsLevel, GridConfig, GridPreset, Metric, OracleKind, RunSettings, TrialOutcome, TrialRecord};
use tiltprox::model::{Bundle, BundleElement, BundleVariant};
use tiltprox::oracles::{BallNoiseOracle, ExactOracle, Oracle};
use tiltprox::problems::{eval_max_quad, eval_test_function, generate_max_quad, nf_levels, reference_prox, GeneratorParams, MaxQuadProblem, TestFunction};
use tiltprox::prox_qp::{dist_to_hull, prox_of_model};
use tiltprox::rng::RngState;
use tiltprox::solver::{run, SolverConfig, StopReason};
use tiltprox::Vector;

const S_TOL: f64 = 1e-3;
const R: f64 = 1.0;
const MASTER_SEED: u64 = 20_240_601;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

struct Batch {
    problems: Vec<MaxQuadProblem>,
    outcomes: Vec<TrialOutcome>,
}

/// Criterion-1 batch: every desk-grid state for n ∈ {4, 10}, all variants and
/// error levels, ball-noise oracle, traces recorded.
fn criterion_one_batch() -> Batch {
    let grid = GridConfig::preset(GridPreset::Desk, MASTER_SEED);
    let problems: Vec<MaxQuadProblem> = grid
        .problems()
        .iter()
        .map(|s| generate_max_quad(&s.params).expect("generator"))
        .collect();
    let mut outcomes = Vec::new();
    for p in &problems {
        let settings = RunSettings {
            oracle: OracleKind::Ball,
            prox_param: R,
            stop_tol: S_TOL,
            iteration_cap: 100 * p.n,
            record_trace: true,
        };
        for variant in BundleVariant::ALL {
            for eps in EpsLevel::ALL {
                outcomes.push(run_trial(p, variant, eps, &settings));
            }
        }
    }
    Batch { problems, outcomes }
}

fn records(batch: &Batch) -> Vec<&TrialRecord> {
    batch.outcomes.iter().map(|o| &o.record).collect()
}

fn criterion_1(batch: &Batch) -> Verdict {
    let errors = batch.outcomes.iter().filter(|o| o.diagnostic.is_some()).count();
    let mut met = 0;
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut violations = 0;
    for o in &batch.outcomes {
        let r = &o.record;
        if r.solved {
            met += 1;
            let bound = S_TOL + r.eps_level.value(S_TOL) / R + 1e-8;
            worst = worst.max(r.final_distance - bound);
            if r.final_distance > bound {
                violations += 1;
            }
        }
    }
    verdict(
        violations == 0 && errors == 0 && batch.outcomes.len() >= 200,
        format!(
            "{} runs, {met} met tolerance, {violations} outside s_tol + eps/r + 1e-8 (max excess {worst:.3e}), {errors} errored",
            batch.outcomes.len()
        ),
    )
}

fn criterion_2(batch: &Batch) -> Verdict {
    let mut checked = 0;
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for o in &batch.outcomes {
        let Some(res) = &o.result else { continue };
        for rec in &res.trace {
            checked += 1;
            let dev = (rec.centre_model_value - res.f_centre).abs();
            let tol = 1e-10 * (1.0 + res.f_centre.abs());
            worst = worst.max(dev / tol);
            if dev > tol {
                violations += 1;
            }
        }
    }
    verdict(
        violations == 0 && checked > 0,
        format!("{checked} iterations checked, {violations} violations (worst deviation {worst:.3} of tolerance)"),
    )
}

/// Recomputes both merit inequalities from the raw trace with a flat 1e-8.
fn criterion_3(batch: &Batch) -> Verdict {
    const TOL: f64 = 1e-8;
    let mut runs = 0;
    let mut violations = 0;
    let mut worst: f64 = f64::NEG_INFINITY;
    let per_problem = BundleVariant::ALL.len() * EpsLevel::ALL.len();
    for (problem, o) in batch
        .problems
        .iter()
        .flat_map(|p| std::iter::repeat_n(p, per_problem))
        .zip(&batch.outcomes)
    {
        let Some(res) = &o.result else { continue };
        runs += 1;
        for rec in &res.trace {
            let merit = rec.model_value + 0.5 * R * (&rec.x_next - &problem.z).norm_squared();
            worst = worst.max(merit - res.f_centre);
            if merit > res.f_centre + TOL || (merit - rec.merit).abs() > 1e-9 * (1.0 + merit.abs()) {
                violations += 1;
            }
        }
        for pair in res.trace.windows(2) {
            let step = (&pair[1].x_next - &pair[0].x_next).norm_squared();
            let shortfall = pair[0].merit + 0.5 * R * step - pair[1].merit;
            worst = worst.max(shortfall);
            if shortfall > TOL {
                violations += 1;
            }
        }
    }
    verdict(
        violations == 0 && runs > 0,
        format!("{runs} traced runs, {violations} merit violations (largest excess {worst:.3e})"),
    )
}

fn criterion_4() -> Verdict {
    let mut rng = RngState::with_stream(MASTER_SEED, 4);
    let mut violations = 0;
    let mut worst: f64 = f64::NEG_INFINITY;
    let evaluations = 1000;
    for trial in 0..evaluations {
        let n = 2 + rng.below(9);
        let nf = 1 + rng.below(n);
        let nfx = 1 + rng.below(nf);
        let nfz = 1 + rng.below(nf);
        let p = generate_max_quad(&GeneratorParams::new(n, nf, nfx, nfz, rng.next_u64())).expect("generator");
        let eps = [1e-3, 1e-2, 1e-1, 1.0][trial % 4];
        let x = match trial % 3 {
            0 => p.x_star.clone(),
            1 => p.z.clone(),
            _ => &p.z + Vector::from_fn(n, |_, _| rng.normal()),
        };
        let mut oracle = BallNoiseOracle::new(&p, eps, RngState::new(rng.next_u64())).expect("oracle");
        let resp = oracle.query(&x).expect("query");
        let dist = dist_to_hull(&resp.subgrad_approx, &p.active_gradients(&x));
        worst = worst.max(dist - eps);
        if dist > eps + 1e-8 {
            violations += 1;
        }
    }
    verdict(
        violations == 0,
        format!("{evaluations} evaluations, {violations} with dist > eps + 1e-8 (max dist - eps {worst:.3e})"),
    )
}

fn plane(index: i64, site: &[f64], value: f64, slope: &[f64]) -> BundleElement {
    BundleElement::new(
        index,
        Vector::from_column_slice(site),
        value,
        Vector::from_column_slice(slope),
    )
}

fn criterion_5(batch: &Batch) -> Verdict {
    // (a) soft threshold
    let mut worst_a: f64 = 0.0;
    for z in [-3.0, -0.7, 0.0, 0.4, 2.5] {
        let bundle = Bundle::from_elements(
            Vector::from_element(1, z),
            R,
            vec![plane(1, &[1.0], 1.0, &[1.0]), plane(2, &[-1.0], 1.0, &[-1.0])],
        )
        .expect("bundle");
        let x = prox_of_model(&bundle, 1e-14, None).expect("prox").x_next[0];
        let expected = z.signum() * (z.abs() - 1.0 / R).max(0.0);
        worst_a = worst_a.max((x - expected).abs());
    }

    // (b) brute force on small bundles
    let mut rng = RngState::with_stream(MASTER_SEED, 5);
    let mut worst_b: f64 = 0.0;
    for _ in 0..50 {
        let n = 1 + rng.below(2);
        let m = 1 + rng.below(3);
        let z = Vector::from_fn(n, |_, _| rng.normal());
        let r = 0.5 + 2.0 * rng.uniform();
        let elements: Vec<BundleElement> = (0..m)
            .map(|i| {
                BundleElement::new(
                    i as i64 + 1,
                    Vector::from_fn(n, |_, _| rng.normal()),
                    rng.normal(),
                    Vector::from_fn(n, |_, _| 2.0 * rng.normal()),
                )
            })
            .collect();
        let bundle = Bundle::from_elements(z.clone(), r, elements.clone()).expect("bundle");
        let x = prox_of_model(&bundle, 1e-14, None).expect("prox").x_next;
        let brute = common::brute_force_prox(&elements, &z, r);
        worst_b = worst_b.max((x - brute).norm());
    }

    // (c) recombination identity on every traced iteration
    let mut worst_c: f64 = 0.0;
    for o in &batch.outcomes {
        if let Some(res) = &o.result {
            for rec in &res.trace {
                worst_c = worst_c.max(rec.recombination_residual);
            }
        }
    }
    verdict(
        worst_a <= 1e-8 && worst_b <= 1e-8 && worst_c <= 1e-12,
        format!("soft threshold err {worst_a:.2e}, brute force err {worst_b:.2e}, recombination residual {worst_c:.2e}"),
    )
}

fn criterion_6(batch: &Batch) -> Verdict {
    let mut worst: f64 = 0.0;
    let mut tilts = 0;
    let mut unsolved = 0;
    for p in batch.problems.iter().take(50) {
        let mut oracle = ExactOracle::new(p);
        let cfg = SolverConfig::new(p.z.clone()).prox_param(R).stop_tol(S_TOL).record_trace(false);
        let res = run(&mut oracle, &cfg).expect("solve");
        if res.stop_reason != StopReason::ToleranceMet {
            unsolved += 1;
        }
        worst = worst.max((&res.x_out - &p.x_star).norm());
        tilts += res.tilt_corrections;
    }
    verdict(
        worst <= S_TOL && tilts == 0 && unsolved == 0,
        format!("50 problems, max error {worst:.3e}, {tilts} tilt corrections, {unsolved} unsolved"),
    )
}

fn criterion_7() -> Verdict {
    let mut rng = RngState::with_stream(MASTER_SEED, 7);
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    let mut reference_failures = 0;
    for k in 0..200 {
        let n = [4, 10, 25][rng.below(3)];
        let levels = nf_levels(n);
        let nf = levels[rng.below(levels.len())];
        let below: Vec<usize> = levels.iter().copied().filter(|&l| l <= nf).collect();
        let nfx = below[rng.below(below.len())];
        let nfz = below[rng.below(below.len())];
        let params = GeneratorParams::new(n, nf, nfx, nfz, rng.next_u64());
        match generate_max_quad(&params) {
            Ok(p) => {
                let eval_x = eval_max_quad(&p, &p.x_star);
                let eval_z = eval_max_quad(&p, &p.z);
                let ok = p.verify().is_ok()
                    && eval_z.active == p.active_at_z
                    && p.active_at_xstar.iter().all(|i| eval_x.active.contains(i));
                if !ok {
                    failures += 1;
                }
                if k % 10 == 0 {
                    match reference_prox(&p) {
                        Ok(x) => {
                            let err = (x - &p.x_star).norm();
                            worst = worst.max(err);
                            if err > 1e-6 {
                                reference_failures += 1;
                            }
                        }
                        Err(_) => reference_failures += 1,
                    }
                }
            }
            Err(_) => failures += 1,
        }
    }
    verdict(
        failures == 0 && reference_failures == 0,
        format!("200 tuples, {failures} certificate failures; 20 reference checks, max error {worst:.2e}, {reference_failures} failed"),
    )
}

fn criterion_8(batch: &Batch) -> Verdict {
    let recs = records(batch);
    let fraction = |v: BundleVariant| {
        let group: Vec<_> = recs.iter().filter(|r| r.variant == v).collect();
        group.iter().filter(|r| r.solved).count() as f64 / group.len() as f64
    };
    let full = fraction(BundleVariant::Full);
    let others: Vec<(BundleVariant, f64)> = BundleVariant::ALL
        .into_iter()
        .filter(|&v| v != BundleVariant::Full)
        .map(|v| (v, fraction(v)))
        .collect();
    let pass = others.iter().all(|&(_, f)| full >= f - 0.02);
    let listing: Vec<String> = others.iter().map(|(v, f)| format!("{v} {:.1}%", 100.0 * f)).collect();
    verdict(pass, format!("full {:.1}% vs {}", 100.0 * full, listing.join(", ")))
}

fn criterion_9() -> Verdict {
    let grid = GridConfig::preset(GridPreset::Desk, MASTER_SEED ^ 9);
    let specs = grid.problems();
    let mut totals = [0usize; 2];
    let mut count = 0;
    let mut idx = 0;
    while count < 100 {
        let spec = &specs[idx % specs.len()];
        let mut params = spec.params;
        params.seed = params.seed.wrapping_add((idx / specs.len()) as u64);
        idx += 1;
        let p = generate_max_quad(&params).expect("generator");
        for (slot, oracle) in [OracleKind::Ball, OracleKind::Simplex].into_iter().enumerate() {
            let settings = RunSettings {
                oracle,
                prox_param: R,
                stop_tol: S_TOL,
                iteration_cap: 100 * p.n,
                record_trace: false,
            };
            totals[slot] += run_trial(&p, BundleVariant::Full, EpsLevel::Stol, &settings).record.tilt_corrections;
        }
        count += 1;
    }
    let ball = totals[0] as f64 / count as f64;
    let simplex = totals[1] as f64 / count as f64;
    verdict(
        simplex > 0.0 && simplex >= 10.0 * ball,
        format!("mean tilt corrections over {count} problems: simplex {simplex:.3}, ball {ball:.4}"),
    )
}

fn criterion_10() -> Verdict {
    let cases = 1000;
    let mut rng = RngState::with_stream(MASTER_SEED, 10);
    let mut failures = 0;
    for _ in 0..cases {
        let recs = common::random_records(&mut rng);
        let metric = if rng.uniform() < 0.5 { Metric::Time } else { Metric::Iterations };
        let table = performance_profile(&recs, metric).expect("profile");
        if let Err(msg) = common::check_profile(&table, &recs) {
            failures += 1;
            eprintln!("profile property failed: {msg}");
        }
    }
    verdict(failures == 0, format!("{cases} randomized record sets, {failures} failures"))
}

fn criterion_11() -> Verdict {
    let ones = |n| Vector::from_element(n, 1.0);
    let checks = [
        (TestFunction::PAlpha, Vector::from_column_slice(&[1.0, 0.0]), 1.0),
        (TestFunction::MaxExp, Vector::zeros(12), 12.0),
        (TestFunction::Max10, ones(10), 10.0),
        (TestFunction::MaxLog, ones(30), 0.0),
    ];
    let mut wrong = Vec::new();
    for (f, x, expected) in checks {
        let value = eval_test_function(f, &x).expect("evaluate");
        if value != expected {
            wrong.push(format!("{f}: {value} != {expected}"));
        }
    }
    verdict(wrong.is_empty(), if wrong.is_empty() { "4 exact matches".into() } else { wrong.join("; ") })
}

fn main() -> ExitCode {
    let batch = criterion_one_batch();
    let results = [
        criterion_1(&batch),
        criterion_2(&batch),
        criterion_3(&batch),
        criterion_4(),
        criterion_5(&batch),
        criterion_6(&batch),
        criterion_7(),
        criterion_8(&batch),
        criterion_9(),
        criterion_10(),
        criterion_11(),
    ];
    let mut failed = 0;
    for (i, v) in results.iter().enumerate() {
        println!("criterion {:>2}: {} ({})", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if !v.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
