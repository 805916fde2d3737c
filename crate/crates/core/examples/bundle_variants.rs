//! The four bundle-management rules side by side on one problem.
//!
//! cargo run --example bundle_variants

use tiltprox::oracles::ExactOracle;
use tiltprox::problems::{generate_max_quad, GeneratorParams};
use tiltprox::{run, BundleVariant, SolverConfig};

fn main() -> tiltprox::Result<()> {
    let problem = generate_max_quad(&GeneratorParams::new(10, 10, 7, 4, 7))?;
    println!("{:<14} {:>10} {:>12} {:>10}", "variant", "iterations", "|x - x*|", "stop");
    for variant in BundleVariant::ALL {
        let config = SolverConfig::new(problem.z.clone())
            .variant(variant)
            .max_iterations(100 * problem.n)
            .record_trace(true);
        let res = run(&mut ExactOracle::new(&problem), &config)?;
        let largest = res.trace.iter().map(|t| t.bundle_size).max().unwrap_or(0);
        println!(
            "{:<14} {:>10} {:>12.3e} {:>10?}  (largest bundle {largest})",
            variant.as_str(),
            res.iterations,
            (&res.x_out - &problem.x_star).norm(),
            res.stop_reason
        );
    }
    Ok(())
}
