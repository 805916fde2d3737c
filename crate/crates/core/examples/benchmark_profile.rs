//! A small seeded benchmark, its summary table, and an iteration profile.
//!
//! cargo run --release --example benchmark_profile

use tiltprox::bench::{performance_profile, run_trials, summarize, GridConfig, GridPreset, Metric};

fn main() -> tiltprox::Result<()> {
    let mut grid = GridConfig::preset(GridPreset::Desk, 2024);
    grid.dimensions.truncate(1);
    println!("running {} trials", grid.run_count());
    let records = run_trials(&grid, 0)?;
    print!("{}", summarize(&records)?);

    let profile = performance_profile(&records, Metric::Iterations)?;
    println!("\n{:>8} {}", "tau", profile.solvers.iter().map(|s| format!("{:>14}", s.as_str())).collect::<String>());
    for tau in [1.0, 1.5, 2.0, 4.0, 10.0] {
        let row: String = (0..profile.solvers.len())
            .map(|s| format!("{:>14.3}", profile.rho_at(s, tau)))
            .collect();
        println!("{tau:>8.1} {row}");
    }
    Ok(())
}
