//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use tiltprox::bench::{EpsLevel, ProfileTable, TrialRecord};
use tiltprox::model::{BundleElement, BundleVariant};
use tiltprox::rng::RngState;
use tiltprox::Vector;

/// Prox of `max_i plane_i` by enumerating every subset of planes, solving the
/// equality-constrained face problem `min t + (r/2)‖x − z‖²` with
/// `plane_i(x) = t` on the subset, and keeping the candidate with the lowest
/// true objective.
pub fn brute_force_prox(elements: &[BundleElement], z: &Vector, r: f64) -> Vector {
    let n = z.len();
    let m = elements.len();
    let offsets: Vec<f64> = elements.iter().map(|e| e.value - e.subgrad.dot(&e.site)).collect();
    let objective = |x: &Vector| {
        let top = elements
            .iter()
            .zip(&offsets)
            .map(|(e, c)| c + e.subgrad.dot(x))
            .fold(f64::NEG_INFINITY, f64::max);
        top + 0.5 * r * (x - z).norm_squared()
    };
    let mut best: Option<(f64, Vector)> = None;
    for mask in 1u32..(1 << m) {
        let subset: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let s = subset.len();
        // unknowns: x (n), t, mu (s)
        let dim = n + 1 + s;
        let mut k = DMatrix::zeros(dim, dim);
        let mut rhs = DVector::zeros(dim);
        for i in 0..n {
            k[(i, i)] = r;
            rhs[i] = r * z[i];
        }
        for (col, &p) in subset.iter().enumerate() {
            let g = &elements[p].subgrad;
            for i in 0..n {
                k[(i, n + 1 + col)] = g[i];
                k[(n + 1 + col, i)] = g[i];
            }
            k[(n, n + 1 + col)] = -1.0;
            k[(n + 1 + col, n)] = -1.0;
            rhs[n + 1 + col] = -offsets[p];
        }
        rhs[n] = -1.0;
        let svd = k.svd(true, true);
        let Ok(sol) = svd.solve(&rhs, 1e-12) else { continue };
        let x = Vector::from_iterator(n, sol.rows(0, n).iter().copied());
        if !x.iter().all(|v| v.is_finite()) {
            continue;
        }
        let value = objective(&x);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, x));
        }
    }
    best.expect("at least one face").1
}

/// Random record sets for profile property checks: some problems unsolved by
/// everyone, some solver/problem pairs missing, occasional zero wall times.
pub fn random_records(rng: &mut RngState) -> Vec<TrialRecord> {
    let problems = 1 + rng.below(12);
    let solver_count = 1 + rng.below(4);
    let solvers: Vec<BundleVariant> = rng
        .choose(4, solver_count)
        .into_iter()
        .map(|i| BundleVariant::ALL[i])
        .collect();
    let mut out = Vec::new();
    for p in 0..problems {
        let eps = EpsLevel::ALL[rng.below(3)];
        for &variant in &solvers {
            if out.len() > 0 && rng.uniform() < 0.1 {
                continue;
            }
            let spread = if rng.uniform() < 0.3 { 3 } else { 1000 };
            let iterations = 1 + rng.below(spread);
            let wall_time = if rng.uniform() < 0.1 { 0.0 } else { rng.uniform() * 2.0 };
            out.push(TrialRecord {
                problem_id: format!("p{p}"),
                n: 4,
                nf: 1,
                nf_xstar: 1,
                nf_z: 1,
                variant,
                eps_level: eps,
                seed: p as u64,
                solved: rng.uniform() < 0.7,
                iterations,
                wall_time,
                final_distance: rng.uniform(),
                tilt_corrections: 0,
                within_bound: true,
            });
        }
    }
    out
}

/// Checks range, monotonicity, endpoint, and ratio definitions of a profile
/// against a direct recount of the records.
pub fn check_profile(table: &ProfileTable, records: &[TrialRecord]) -> Result<(), String> {
    if table.tau.first() != Some(&1.0) {
        return Err(format!("tau starts at {:?}", table.tau.first()));
    }
    if table.tau.windows(2).any(|w| !(w[0] < w[1])) {
        return Err("tau not strictly increasing".into());
    }
    let mut keys: BTreeMap<(String, EpsLevel), ()> = BTreeMap::new();
    for r in records {
        keys.insert((r.problem_id.clone(), r.eps_level), ());
    }
    let problems = keys.len();
    for (s, &variant) in table.solvers.iter().enumerate() {
        let rho = &table.rho[s];
        if rho.len() != table.tau.len() {
            return Err("rho length".into());
        }
        if rho.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(format!("{variant} rho out of range"));
        }
        if rho.windows(2).any(|w| w[1] < w[0]) {
            return Err(format!("{variant} rho decreases"));
        }
        let solved = records.iter().filter(|r| r.variant == variant && r.solved).count();
        let expected = solved as f64 / problems as f64;
        let last = *rho.last().unwrap();
        if (last - expected).abs() > 1e-12 {
            return Err(format!("{variant} rho(tau_max) {last} != solved fraction {expected}"));
        }
        // direct recount at every tau
        for (t, &tau) in table.tau.iter().enumerate() {
            let mut count = 0;
            for key in keys.keys() {
                let group: Vec<&TrialRecord> = records
                    .iter()
                    .filter(|r| r.problem_id == key.0 && r.eps_level == key.1 && r.solved)
                    .collect();
                let cost = |r: &TrialRecord| match table.metric {
                    tiltprox::bench::Metric::Time => r.wall_time.max(1e-9),
                    tiltprox::bench::Metric::Iterations => r.iterations as f64,
                };
                let Some(mine) = group.iter().find(|r| r.variant == variant) else { continue };
                let baseline = group.iter().map(|r| cost(r)).fold(f64::INFINITY, f64::min);
                let ratio = if cost(mine) == baseline { 1.0 } else { cost(mine) / baseline };
                if ratio <= tau {
                    count += 1;
                }
            }
            let expected = count as f64 / problems as f64;
            if (rho[t] - expected).abs() > 1e-12 {
                return Err(format!("{variant} rho({tau}) = {} but recount gives {expected}", rho[t]));
            }
        }
    }
    Ok(())
}
