use nalgebra::DMatrix;

use super::{MaxQuadProblem, Quadratic, ACTIVITY_MARGIN};
use crate::error::{Error, Result};
use crate::rng::RngState;
use crate::Vector;

const WEIGHT_FLOOR: f64 = 0.05;
const SPARSE_ZERO_FRACTION: f64 = 0.95;
const MAX_ATTEMPTS: u64 = 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorParams {
    pub n: usize,
    pub nf: usize,
    pub nf_xstar: usize,
    pub nf_z: usize,
    pub r: f64,
    pub seed: u64,
    pub sparse: bool,
}

impl GeneratorParams {
    pub fn new(n: usize, nf: usize, nf_xstar: usize, nf_z: usize, seed: u64) -> Self {
        Self {
            n,
            nf,
            nf_xstar,
            nf_z,
            r: 1.0,
            seed,
            sparse: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.nf == 0 {
            return bad("nf must be at least 1".into());
        }
        if self.nf_xstar == 0 || self.nf_xstar > self.nf {
            return bad(format!("nf_xstar must lie in 1..={}, got {}", self.nf, self.nf_xstar));
        }
        if self.nf_z == 0 || self.nf_z > self.nf {
            return bad(format!("nf_z must lie in 1..={}, got {}", self.nf, self.nf_z));
        }
        if !(self.r > 0.0) || !self.r.is_finite() {
            return bad(format!("r must be positive, got {}", self.r));
        }
        Ok(())
    }
}

/// The activity counts used by the benchmark grid: `{1, ⌈n/3⌉, ⌈2n/3⌉, n}`.
pub fn nf_levels(n: usize) -> Vec<usize> {
    let mut levels = vec![1, n.div_ceil(3), (2 * n).div_ceil(3), n];
    levels.sort_unstable();
    levels.dedup();
    levels
}

/// Generates a max-of-quadratics instance with a certified prox point.
///
/// Construction:
/// 1. draw `z`, a unit direction `d`, and `x* = z + s·d` with `s ∈ (0.1, 1)`;
/// 2. draw simplex weights (floor 0.05 before renormalizing) over the pieces
///    active at `x*`, draw their gradients at `x*` freely except the last,
///    which is solved so the weighted sum equals `r(z − x*)`;
/// 3. draw Hessians `BᵀB` (95% of `B` masked to zero when sparse), then fix
///    the linear terms so the gradients at `x*` are as drawn and the constants
///    so active pieces vanish at `x*` and inactive ones sit below by `[1e-3, 1]`;
/// 4. lift the pieces chosen to be active at `z` (the top piece plus random
///    others) by multiples of `½‖x − x*‖²` until they tie `2e-3` above the
///    previous max, leaving everything at `x*` untouched;
/// 5. bound gradient norms on the ball of radius `2K₀/r` about `z`.
///
/// The result is verified; a failing draw is retried on the next substream.
pub fn generate_max_quad(params: &GeneratorParams) -> Result<MaxQuadProblem> {
    params.validate()?;
    let mut last_err = None;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = RngState::with_stream(params.seed, attempt);
        let problem = build(params, &mut rng)?;
        match problem.verify() {
            Ok(()) => return Ok(problem),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Certificate("generation failed".into())))
}

fn normal_vector(rng: &mut RngState, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| rng.normal())
}

fn build(params: &GeneratorParams, rng: &mut RngState) -> Result<MaxQuadProblem> {
    let GeneratorParams {
        n,
        nf,
        nf_xstar,
        nf_z,
        r,
        seed,
        sparse,
    } = *params;

    // (1)
    let z = normal_vector(rng, n);
    let direction = loop {
        let d = normal_vector(rng, n);
        let norm = d.norm();
        if norm > 1e-8 {
            break d / norm;
        }
    };
    let s = 0.1 + 0.9 * rng.uniform_open();
    let x_star = &z + &direction * s;

    // (2)
    let active_xstar = rng.choose(nf, nf_xstar);
    let raw: Vec<f64> = (0..nf_xstar).map(|_| WEIGHT_FLOOR + rng.uniform()).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let target = (&z - &x_star) * r;
    let mut grads: Vec<Vector> = (0..nf).map(|_| normal_vector(rng, n)).collect();
    let (&last, rest) = active_xstar.split_last().expect("at least one active piece");
    let mut partial = Vector::zeros(n);
    for (k, &i) in rest.iter().enumerate() {
        partial.axpy(weights[k], &grads[i], 1.0);
    }
    grads[last] = (&target - partial) / weights[nf_xstar - 1];

    // (3)
    let mut quadratics = Vec::with_capacity(nf);
    for (i, grad) in grads.iter().enumerate() {
        let mut b_factor = DMatrix::from_fn(n, n, |_, _| rng.normal());
        if sparse {
            for v in b_factor.iter_mut() {
                if rng.uniform() < SPARSE_ZERO_FRACTION {
                    *v = 0.0;
                }
            }
        }
        let prod = b_factor.tr_mul(&b_factor);
        let a = (&prod + prod.transpose()) * 0.5;
        let lin = grad - &a * &x_star;
        let mut c = -(0.5 * x_star.dot(&(&a * &x_star)) + lin.dot(&x_star));
        if !active_xstar.contains(&i) {
            c -= rng.uniform_in(ACTIVITY_MARGIN, 1.0);
        }
        quadratics.push(Quadratic::new(a, lin, c)?);
    }

    // (4)
    let at_z: Vec<f64> = quadratics.iter().map(|q| q.value(&z)).collect();
    let mut top = 0;
    for (i, &v) in at_z.iter().enumerate() {
        if v > at_z[top] {
            top = i;
        }
    }
    let others: Vec<usize> = (0..nf).filter(|&i| i != top).collect();
    let mut active_z = vec![top];
    active_z.extend(rng.choose(others.len(), nf_z - 1).into_iter().map(|k| others[k]));
    let lifted_max = at_z[top] + 2.0 * ACTIVITY_MARGIN;
    let bump_at_z = 0.5 * (&z - &x_star).norm_squared();
    for &i in &active_z {
        let t = (lifted_max - at_z[i]) / bump_at_z;
        quadratics[i].add_proximal_bump(t, &x_star);
    }
    active_z.sort_unstable();
    let mut active_xstar = active_xstar;
    active_xstar.sort_unstable();

    // (5)
    let grad_norm_at_z = |q: &Quadratic| q.gradient(&z).norm();
    let k0 = quadratics.iter().map(grad_norm_at_z).fold(0.0, f64::max);
    let radius = 2.0 * k0 / r;
    let lipschitz_bound = quadratics
        .iter()
        .map(|q| {
            let spectral = q
                .hessian()
                .clone()
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .fold(0.0, f64::max);
            grad_norm_at_z(q) + spectral * radius
        })
        .fold(0.0, f64::max);

    Ok(MaxQuadProblem {
        n,
        nf,
        nf_xstar,
        nf_z,
        quadratics,
        z,
        r,
        x_star,
        active_at_xstar: active_xstar,
        active_at_z: active_z,
        lipschitz_bound,
        seed,
        sparse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::eval_max_quad;

    #[test]
    fn levels_match_grid() {
        assert_eq!(nf_levels(4), vec![1, 2, 3, 4]);
        assert_eq!(nf_levels(10), vec![1, 4, 7, 10]);
        assert_eq!(nf_levels(25), vec![1, 9, 17, 25]);
        assert_eq!(nf_levels(1), vec![1]);
        assert_eq!(nf_levels(2), vec![1, 2]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(generate_max_quad(&GeneratorParams::new(3, 2, 3, 1, 0)).is_err());
        assert!(generate_max_quad(&GeneratorParams::new(3, 2, 1, 0, 0)).is_err());
        assert!(generate_max_quad(&GeneratorParams::new(0, 1, 1, 1, 0)).is_err());
        let mut p = GeneratorParams::new(3, 2, 1, 1, 0);
        p.r = -1.0;
        assert!(generate_max_quad(&p).is_err());
    }

    #[test]
    fn single_piece_matches_linear_solve() {
        let p = generate_max_quad(&GeneratorParams::new(5, 1, 1, 1, 17)).unwrap();
        let q = &p.quadratics[0];
        let lhs = q.hessian() + DMatrix::identity(5, 5) * p.r;
        let rhs = &p.z * p.r - q.linear();
        let x = lhs.lu().solve(&rhs).unwrap();
        assert!((x - &p.x_star).amax() < 1e-8);
    }

    #[test]
    fn activity_pattern_holds() {
        let p = generate_max_quad(&GeneratorParams::new(6, 4, 3, 2, 5)).unwrap();
        assert_eq!(eval_max_quad(&p, &p.x_star).active, p.active_at_xstar);
        assert_eq!(eval_max_quad(&p, &p.z).active, p.active_at_z);
        assert!(p.lipschitz_bound > 0.0);
        assert!((&p.x_star - &p.z).norm() < 2.0 * p.lipschitz_bound / p.r);
    }

    #[test]
    fn generation_is_deterministic() {
        let params = GeneratorParams::new(4, 4, 2, 2, 1234);
        assert_eq!(generate_max_quad(&params).unwrap(), generate_max_quad(&params).unwrap());
        let other = GeneratorParams { seed: 1235, ..params };
        assert_ne!(generate_max_quad(&params).unwrap(), generate_max_quad(&other).unwrap());
    }

    #[test]
    fn sparse_hessians_are_mostly_zero() {
        let mut params = GeneratorParams::new(40, 2, 1, 1, 8);
        params.sparse = true;
        let p = generate_max_quad(&params).unwrap();
        let q = &p.quadratics[0];
        let zeros = q.hessian().iter().filter(|&&v| v == 0.0).count();
        assert!(zeros as f64 > 0.5 * (40 * 40) as f64, "{zeros} zeros");
    }
}
