//! Prox of every built-in nonsmooth test function from its default centre.
//!
//! cargo run --example test_functions

use tiltprox::oracles::ExactOracle;
use tiltprox::problems::TestFunction;
use tiltprox::{run, SolverConfig};

fn main() -> tiltprox::Result<()> {
    println!("{:<10} {:>3} {:>12} {:>12} {:>6}", "function", "n", "f(z)", "f(prox)", "iters");
    for f in TestFunction::ALL {
        let config = SolverConfig::new(f.default_centre()).stop_tol(1e-5);
        let res = run(&mut ExactOracle::new(f), &config)?;
        println!(
            "{:<10} {:>3} {:>12.5} {:>12.5} {:>6}",
            f.name(),
            f.dimension(),
            res.f_centre,
            res.f_out,
            res.iterations
        );
    }
    Ok(())
}
