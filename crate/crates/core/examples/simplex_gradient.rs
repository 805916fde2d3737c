//! Derivative-free prox: subgradients from forward simplex gradients.
//!
//! cargo run --example simplex_gradient

use tiltprox::oracles::{default_simplex_delta, simplex_gradient, SimplexGradientOracle};
use tiltprox::problems::TestFunction;
use tiltprox::{run, SolverConfig, Vector};

fn main() -> tiltprox::Result<()> {
    // a smooth function first: the estimate is accurate to O(delta)
    let f = |x: &Vector| Ok((x[0] - 1.0).powi(2) + 3.0 * x[1].powi(2));
    let x = Vector::from_vec(vec![0.5, 0.5]);
    let (value, grad) = simplex_gradient(f, &x, default_simplex_delta(&x), false)?;
    println!("f = {value:.6}, simplex gradient = [{:.6}, {:.6}] (true [-1, 3])", grad[0], grad[1]);

    // then a kinked one, where the solver relies on tilt correction
    for function in [TestFunction::Cb2, TestFunction::Mifflin2] {
        let z = function.default_centre();
        let oracle = SimplexGradientOracle::new(function, None, 1e-3);
        let config = SolverConfig::new(z).stop_tol(1e-3).eps(1e-3);
        let res = run(&mut { oracle }, &config)?;
        println!(
            "{}: {:?} after {} iterations, {} tilt corrections, f = {:.6}",
            function.name(),
            res.stop_reason,
            res.iterations,
            res.tilt_corrections,
            res.f_out
        );
    }
    Ok(())
}
