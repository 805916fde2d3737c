//! Build a problem with a known prox, check its certificate, save it as JSON.
//!
//! cargo run --example generate_problem -- [out.json]

use std::path::PathBuf;

use tiltprox::problems::{eval_max_quad, generate_max_quad, read_problem, write_problem, GeneratorParams};

fn main() -> tiltprox::Result<()> {
    let params = GeneratorParams::new(6, 5, 3, 2, 42);
    let problem = generate_max_quad(&params)?;
    problem.verify()?;

    let at_x = eval_max_quad(&problem, &problem.x_star);
    let at_z = eval_max_quad(&problem, &problem.z);
    println!("id {}", problem.id());
    println!("active at x*: {:?} (value {:.6})", at_x.active, at_x.value);
    println!("active at z:  {:?} (value {:.6})", at_z.active, at_z.value);
    println!("|z - x*| = {:.4}, Lipschitz bound {:.3}", (&problem.z - &problem.x_star).norm(), problem.lipschitz_bound);

    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join(format!("{}.json", problem.id())));
    write_problem(&problem, &path)?;
    assert_eq!(read_problem(&path)?, problem);
    println!("saved to {}", path.display());
    Ok(())
}
