//! Proximal points of convex functions from exact values and inexact subgradients.
//!
//! The solver builds a cutting-plane model of `f` around a prox centre `z`,
//! tilts any plane that would overshoot `f(z)`, and stops once the model gap
//! certifies `‖x − Prox_f^r(z)‖ ≤ s_tol + ε/r`.
//!
//! ```
//! use tiltprox::{oracles::FnOracle, solver::{run, SolverConfig}, Vector};
//!
//! let mut oracle = FnOracle::new(1, 0.0, |x: &Vector| (x[0].abs(), Vector::from_element(1, x[0].signum())));
//! let result = run(&mut oracle, &SolverConfig::new(Vector::from_element(1, 3.0))).unwrap();
//! assert!((result.x_out[0] - 2.0).abs() <= 1e-3);
//! ```

pub mod bench;
pub mod error;
pub mod model;
pub mod oracles;
pub mod problems;
pub mod prox_qp;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use model::{Bundle, BundleElement, BundleVariant};
pub use solver::{run, SolveResult, SolverConfig, StopReason};

pub type Vector = nalgebra::DVector<f64>;
