//! Prox of a generated max-of-quadratics problem, exact and noisy.
//!
//! cargo run --example solve_quadratic

use tiltprox::oracles::{BallNoiseOracle, ExactOracle};
use tiltprox::problems::{generate_max_quad, GeneratorParams};
use tiltprox::rng::RngState;
use tiltprox::{run, SolverConfig};

fn main() -> tiltprox::Result<()> {
    let problem = generate_max_quad(&GeneratorParams::new(10, 7, 4, 3, 2024))?;
    let config = SolverConfig::new(problem.z.clone()).stop_tol(1e-4);

    let exact = run(&mut ExactOracle::new(&problem), &config)?;
    println!(
        "exact: {} iterations, |x - x*| = {:.2e}, bound {:.2e}",
        exact.iterations,
        (&exact.x_out - &problem.x_star).norm(),
        exact.error_bound
    );

    for eps in [1e-3, 1e-2, 1e-1] {
        let mut oracle = BallNoiseOracle::new(&problem, eps, RngState::new(1))?;
        let res = run(&mut oracle, &config.clone().eps(eps))?;
        println!(
            "eps {eps:.0e}: {} iterations, {} tilt corrections, |x - x*| = {:.2e}, bound {:.2e}",
            res.iterations,
            res.tilt_corrections,
            (&res.x_out - &problem.x_star).norm(),
            res.error_bound
        );
    }
    Ok(())
}
