//! Test problems with known proximal points.
//!
//! [`generate_max_quad`] builds `f = max_i q_i` with prescribed numbers of
//! pieces active at the prox-centre and at the true prox point, and records the
//! prox point together with its optimality certificate. [`TestFunction`] holds
//! the fixed derivative-free suite.

mod format;
mod generator;
mod reference;
mod test_functions;

use nalgebra::DMatrix;

use crate::error::{ensure_finite, Error, Result};
use crate::oracles::PiecewiseSmooth;
use crate::prox_qp::dist_to_hull;
use crate::Vector;

pub use format::{read_problem, write_problem, ProblemFile};
pub use generator::{generate_max_quad, nf_levels, GeneratorParams};
pub use reference::{reference_prox, reference_prox_of};
pub use test_functions::{eval_test_function, TestFunction};

/// Margin separating active from inactive pieces at `x*` and at `z`.
pub const ACTIVITY_MARGIN: f64 = 1e-3;

/// Pieces within this relative distance of the max count as active.
pub const ACTIVE_REL_TOL: f64 = 1e-10;

/// Maximum hull distance accepted for the prox optimality certificate.
pub const CERTIFICATE_TOL: f64 = 1e-10;

/// `q(x) = ½ xᵀAx + bᵀx + c` with `A` symmetric positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadratic {
    a: DMatrix<f64>,
    b: Vector,
    c: f64,
}

impl Quadratic {
    pub fn new(a: DMatrix<f64>, b: Vector, c: f64) -> Result<Self> {
        let n = b.len();
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::Dimension {
                expected: n,
                got: a.nrows(),
            });
        }
        ensure_finite(a.as_slice(), "quadratic Hessian")?;
        ensure_finite(b.as_slice(), "quadratic linear term")?;
        ensure_finite(&[c], "quadratic constant")?;
        let q = Self { a, b, c };
        q.check_convex()?;
        Ok(q)
    }

    /// Symmetric to `1e-12` and smallest eigenvalue at least `-1e-10`.
    pub fn check_convex(&self) -> Result<()> {
        let scale = 1.0 + self.a.amax();
        let asym = (&self.a - self.a.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(Error::InvalidParameter(format!(
                "Hessian not symmetric (asymmetry {asym:e})"
            )));
        }
        if self.b.is_empty() {
            return Ok(());
        }
        let min_eig = self
            .a
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -1e-10 {
            return Err(Error::InvalidParameter(format!(
                "Hessian not positive semidefinite (eigenvalue {min_eig:e})"
            )));
        }
        Ok(())
    }

    pub fn hessian(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn linear(&self) -> &Vector {
        &self.b
    }

    pub fn constant(&self) -> f64 {
        self.c
    }

    pub fn dimension(&self) -> usize {
        self.b.len()
    }

    pub fn value(&self, x: &Vector) -> f64 {
        0.5 * x.dot(&(&self.a * x)) + self.b.dot(x) + self.c
    }

    pub fn gradient(&self, x: &Vector) -> Vector {
        &self.a * x + &self.b
    }

    /// Adds `t · ½‖x − centre‖²`.
    pub(crate) fn add_proximal_bump(&mut self, t: f64, centre: &Vector) {
        for i in 0..self.b.len() {
            self.a[(i, i)] += t;
        }
        self.b -= centre * t;
        self.c += 0.5 * t * centre.norm_squared();
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaxQuadProblem {
    pub n: usize,
    pub nf: usize,
    pub nf_xstar: usize,
    pub nf_z: usize,
    pub quadratics: Vec<Quadratic>,
    pub z: Vector,
    pub r: f64,
    /// Prox of `f` at `z` with parameter `r`.
    pub x_star: Vector,
    /// Zero-based indices of the pieces active at `x_star`.
    pub active_at_xstar: Vec<usize>,
    /// Zero-based indices of the pieces active at `z`.
    pub active_at_z: Vec<usize>,
    pub lipschitz_bound: f64,
    pub seed: u64,
    pub sparse: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaxQuadEval {
    pub value: f64,
    /// Indices within `ACTIVE_REL_TOL · (1 + |value|)` of the max, ascending.
    pub active: Vec<usize>,
    pub first_active_grad: Vector,
}

pub fn eval_max_quad(problem: &MaxQuadProblem, x: &Vector) -> MaxQuadEval {
    let values: Vec<f64> = problem.quadratics.iter().map(|q| q.value(x)).collect();
    let value = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = ACTIVE_REL_TOL * (1.0 + value.abs());
    let active: Vec<usize> = values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= value - tol)
        .map(|(i, _)| i)
        .collect();
    let first_active_grad = problem.quadratics[active[0]].gradient(x);
    MaxQuadEval {
        value,
        active,
        first_active_grad,
    }
}

impl MaxQuadProblem {
    pub fn value(&self, x: &Vector) -> f64 {
        self.quadratics
            .iter()
            .map(|q| q.value(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Gradients of every piece active at `x`.
    pub fn active_gradients(&self, x: &Vector) -> Vec<Vector> {
        eval_max_quad(self, x)
            .active
            .iter()
            .map(|&i| self.quadratics[i].gradient(x))
            .collect()
    }

    pub fn id(&self) -> String {
        format!(
            "n{}-nf{}-x{}-z{}-{:016x}",
            self.n, self.nf, self.nf_xstar, self.nf_z, self.seed
        )
    }

    /// Checks the activity pattern, margins, convexity, and the prox certificate.
    pub fn verify(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Certificate(msg));
        if self.quadratics.len() != self.nf {
            return fail(format!("{} pieces, expected {}", self.quadratics.len(), self.nf));
        }
        if self.active_at_xstar.len() != self.nf_xstar || self.active_at_z.len() != self.nf_z {
            return fail("active set sizes do not match parameters".into());
        }
        if self.nf_xstar > self.nf || self.nf_z > self.nf {
            return fail("more active pieces than pieces".into());
        }
        for q in &self.quadratics {
            q.check_convex()?;
        }
        for (point, expected, label) in [
            (&self.x_star, &self.active_at_xstar, "x*"),
            (&self.z, &self.active_at_z, "z"),
        ] {
            let ev = eval_max_quad(self, point);
            let mut want = expected.clone();
            want.sort_unstable();
            if ev.active != want {
                return fail(format!(
                    "active set at {label} is {:?}, expected {:?}",
                    ev.active, want
                ));
            }
            let runner_up = self
                .quadratics
                .iter()
                .enumerate()
                .filter(|(i, _)| !want.contains(i))
                .map(|(_, q)| q.value(point))
                .fold(f64::NEG_INFINITY, f64::max);
            if ev.value - runner_up < ACTIVITY_MARGIN * (1.0 - 1e-9) {
                return fail(format!(
                    "activity margin at {label} is {:e}",
                    ev.value - runner_up
                ));
            }
        }
        let target = (&self.z - &self.x_star) * self.r;
        let grads: Vec<Vector> = self
            .active_at_xstar
            .iter()
            .map(|&i| self.quadratics[i].gradient(&self.x_star))
            .collect();
        let dist = dist_to_hull(&target, &grads);
        if !(dist <= CERTIFICATE_TOL) {
            return fail(format!("prox certificate hull distance {dist:e}"));
        }
        Ok(())
    }
}

impl PiecewiseSmooth for MaxQuadProblem {
    fn dimension(&self) -> usize {
        self.n
    }

    fn value(&self, x: &Vector) -> Result<f64> {
        Ok(MaxQuadProblem::value(self, x))
    }

    fn first_active(&self, x: &Vector) -> Result<(f64, Vector)> {
        let ev = eval_max_quad(self, x);
        Ok((ev.value, ev.first_active_grad))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_rejects_indefinite() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(Quadratic::new(a, Vector::zeros(2), 0.0).is_err());
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(Quadratic::new(a, Vector::zeros(2), 0.0).is_err());
    }

    #[test]
    fn proximal_bump_keeps_value_and_gradient_at_centre() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let mut q = Quadratic::new(a, Vector::from_column_slice(&[1.0, -1.0]), 0.5).unwrap();
        let centre = Vector::from_column_slice(&[0.5, 2.0]);
        let (v0, g0) = (q.value(&centre), q.gradient(&centre));
        q.add_proximal_bump(3.0, &centre);
        assert!((q.value(&centre) - v0).abs() < 1e-12);
        assert!((q.gradient(&centre) - g0).amax() < 1e-12);
        let far = Vector::from_column_slice(&[1.5, 2.0]);
        let plain = Quadratic::new(
            DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]),
            Vector::from_column_slice(&[1.0, -1.0]),
            0.5,
        )
        .unwrap();
        assert!((q.value(&far) - plain.value(&far) - 1.5).abs() < 1e-12);
    }
}
