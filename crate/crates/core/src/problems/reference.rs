//! Independent prox computation for max-of-quadratics.
//!
//! Works on the Lagrangian dual `max_λ min_x Σλ_i q_i(x) + (r/2)‖x − z‖²` over
//! the simplex, where the inner minimizer is one linear solve. Projected
//! gradient ascent locates the active pieces; Newton's method on the KKT system
//! of that active set then polishes the point to machine precision.

use nalgebra::{DMatrix, DVector};

use super::{MaxQuadProblem, Quadratic};
use crate::error::{Error, Result};
use crate::prox_qp::project_simplex;
use crate::Vector;

/// Agreement demanded between the reference prox and the stored `x_star`.
pub const REFERENCE_MISMATCH_TOL: f64 = 1e-5;

/// Recomputes the prox of `problem` at its centre and compares it with `x_star`.
pub fn reference_prox(problem: &MaxQuadProblem) -> Result<Vector> {
    let x = reference_prox_of(&problem.quadratics, &problem.z, problem.r)?;
    let err = (&x - &problem.x_star).norm();
    if err > REFERENCE_MISMATCH_TOL {
        return Err(Error::ReferenceMismatch(err));
    }
    Ok(x)
}

/// Prox of `max_i q_i` at `z` with parameter `r`.
pub fn reference_prox_of(quadratics: &[Quadratic], z: &Vector, r: f64) -> Result<Vector> {
    if quadratics.is_empty() {
        return Err(Error::InvalidParameter("no quadratics".into()));
    }
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("r must be positive, got {r}")));
    }
    let dual = Dual { quadratics, z, r };
    let (lambda, x) = dual.ascend()?;
    let x = dual.newton_polish(&lambda, &x).unwrap_or(x);
    Ok(x)
}

struct Dual<'a> {
    quadratics: &'a [Quadratic],
    z: &'a Vector,
    r: f64,
}

impl Dual<'_> {
    fn inner_minimizer(&self, lambda: &[f64]) -> Result<Vector> {
        let n = self.z.len();
        let mut h = DMatrix::identity(n, n) * self.r;
        let mut rhs = self.z * self.r;
        for (q, &l) in self.quadratics.iter().zip(lambda) {
            if l != 0.0 {
                h += q.hessian() * l;
                rhs -= q.linear() * l;
            }
        }
        h.cholesky()
            .map(|c| c.solve(&rhs))
            .ok_or_else(|| Error::InvalidParameter("inner system not positive definite".into()))
    }

    fn dual_value(&self, lambda: &[f64], x: &Vector) -> f64 {
        let weighted: f64 = self
            .quadratics
            .iter()
            .zip(lambda)
            .map(|(q, &l)| l * q.value(x))
            .sum();
        weighted + 0.5 * self.r * (x - self.z).norm_squared()
    }

    fn ascend(&self) -> Result<(Vec<f64>, Vector)> {
        let m = self.quadratics.len();
        let mut lambda = vec![1.0 / m as f64; m];
        let mut x = self.inner_minimizer(&lambda)?;
        let mut value = self.dual_value(&lambda, &x);
        let mut step = 1.0;
        for _ in 0..20_000 {
            let grad: Vec<f64> = self.quadratics.iter().map(|q| q.value(&x)).collect();
            let max = grad.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mean: f64 = grad.iter().zip(&lambda).map(|(g, l)| g * l).sum();
            if max - mean <= 1e-13 * (1.0 + max.abs()) {
                break;
            }
            loop {
                let trial: Vec<f64> = lambda
                    .iter()
                    .zip(&grad)
                    .map(|(l, g)| l + step * g)
                    .collect();
                let next = project_simplex(&trial);
                let next_x = self.inner_minimizer(&next)?;
                let next_value = self.dual_value(&next, &next_x);
                let delta: Vec<f64> = next.iter().zip(&lambda).map(|(a, b)| a - b).collect();
                let linear: f64 = delta.iter().zip(&grad).map(|(d, g)| d * g).sum();
                let sq: f64 = delta.iter().map(|d| d * d).sum();
                if next_value >= value + linear - sq / (2.0 * step) - 1e-15 * (1.0 + value.abs()) {
                    lambda = next;
                    x = next_x;
                    value = next_value;
                    step *= 2.0;
                    break;
                }
                step *= 0.5;
                if step < 1e-30 {
                    return Ok((lambda, x));
                }
            }
        }
        Ok((lambda, x))
    }

    /// Newton on `Σλ_i ∇q_i(x) + r(x − z) = 0`, `q_i(x) = μ` (i ∈ S), `Σλ_i = 1`.
    fn newton_polish(&self, lambda: &[f64], x0: &Vector) -> Option<Vector> {
        let support: Vec<usize> = (0..lambda.len()).filter(|&i| lambda[i] > 1e-9).collect();
        let n = self.z.len();
        let s = support.len();
        let mut x = x0.clone();
        let mut lam: Vec<f64> = support.iter().map(|&i| lambda[i]).collect();
        let total: f64 = lam.iter().sum();
        lam.iter_mut().for_each(|l| *l /= total);
        let mut mu = support
            .iter()
            .map(|&i| self.quadratics[i].value(&x))
            .sum::<f64>()
            / s as f64;
        for _ in 0..50 {
            let dim = n + s + 1;
            let mut jac = DMatrix::zeros(dim, dim);
            let mut res = DVector::zeros(dim);
            let mut stationarity = (&x - self.z) * self.r;
            let mut hess = DMatrix::identity(n, n) * self.r;
            for (k, &i) in support.iter().enumerate() {
                let q = &self.quadratics[i];
                let g = q.gradient(&x);
                stationarity.axpy(lam[k], &g, 1.0);
                hess += q.hessian() * lam[k];
                jac.view_mut((0, n + k), (n, 1)).copy_from(&g);
                jac.view_mut((n + k, 0), (1, n)).copy_from(&g.transpose());
                jac[(n + k, n + s)] = -1.0;
                jac[(n + s, n + k)] = 1.0;
                res[n + k] = q.value(&x) - mu;
            }
            jac.view_mut((0, 0), (n, n)).copy_from(&hess);
            res.rows_mut(0, n).copy_from(&stationarity);
            res[n + s] = lam.iter().sum::<f64>() - 1.0;
            let scale = 1.0 + mu.abs() + stationarity.amax();
            if res.amax() <= 1e-14 * scale {
                break;
            }
            let delta = jac.lu().solve(&(-res))?;
            for i in 0..n {
                x[i] += delta[i];
            }
            for k in 0..s {
                lam[k] += delta[n + k];
            }
            mu += delta[n + s];
        }
        if lam.iter().any(|&l| l < -1e-12) || !x.iter().all(|v| v.is_finite()) {
            return None;
        }
        let max = self
            .quadratics
            .iter()
            .map(|q| q.value(&x))
            .fold(f64::NEG_INFINITY, f64::max);
        if max > mu + 1e-9 * (1.0 + mu.abs()) {
            return None;
        }
        Some(x)
    }
}
