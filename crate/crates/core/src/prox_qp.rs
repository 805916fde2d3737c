//! Prox of a max-of-affine model through its simplex-constrained dual.
//!
//! For planes `e_i + g_iᵀ(x − z)` the prox at `z` with parameter `r` is
//! `x = z − Gλ/r`, where `λ` minimizes `‖Gλ‖²/(2r) − eᵀλ` over the unit simplex.
//! The solver is a primal active-set method that keeps the support's slopes
//! affinely independent, with accelerated projected gradient as a fallback
//! when rounding stalls it. The residual
//! reported is the duality gap `Σ λ_i (φ(x) − plane_i(x))`, which bounds the
//! suboptimality of both the primal and the dual.

use nalgebra::{DMatrix, DVector};

use crate::error::{ensure_finite, Error, Result};
use crate::model::Bundle;
use crate::Vector;

const MAX_APG_ITERATIONS: usize = 50_000;
const GAP_CHECK_EVERY: usize = 20;
/// Relative residual below which a slope counts as affinely dependent on the support.
const DEPENDENCE_TOL: f64 = 1e-10;
/// Relative singular-value cutoff for the dependence least-squares solve on
/// unit-length slope differences.
const SVD_CUTOFF: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct DualQp {
    /// Columns are the plane slopes `g_i`.
    g: DMatrix<f64>,
    /// Plane values at the prox-centre.
    e: DVector<f64>,
    r: f64,
}

#[derive(Clone, Debug)]
pub struct DualSolution {
    pub lambda: Vec<f64>,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct ProxSolution {
    pub x_next: Vector,
    pub lambda: Vec<f64>,
    pub kkt_residual: f64,
    pub iterations: usize,
}

impl DualQp {
    pub fn new(g: DMatrix<f64>, e: DVector<f64>, r: f64) -> Result<Self> {
        if g.ncols() == 0 || g.ncols() != e.len() {
            return Err(Error::InvalidParameter(format!(
                "dual QP needs matching nonempty G ({} columns) and e ({} entries)",
                g.ncols(),
                e.len()
            )));
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "prox parameter must be positive, got {r}"
            )));
        }
        ensure_finite(g.as_slice(), "dual QP matrix")?;
        ensure_finite(e.as_slice(), "dual QP vector")?;
        Ok(Self { g, e, r })
    }

    pub fn from_bundle(bundle: &Bundle) -> Result<Self> {
        if bundle.is_empty() {
            return Err(Error::EmptyBundle);
        }
        let z = bundle.prox_centre();
        let n = bundle.dimension();
        let m = bundle.len();
        let mut g = DMatrix::zeros(n, m);
        let mut e = DVector::zeros(m);
        for (j, el) in bundle.elements().iter().enumerate() {
            g.set_column(j, &el.subgrad);
            e[j] = el.plane_at(z);
        }
        Self::new(g, e, bundle.prox_param())
    }

    pub fn size(&self) -> usize {
        self.e.len()
    }

    pub fn slopes(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn centre_values(&self) -> &DVector<f64> {
        &self.e
    }

    /// `Gλ`.
    pub fn combine(&self, lambda: &[f64]) -> DVector<f64> {
        let mut out = DVector::zeros(self.g.nrows());
        for (j, &l) in lambda.iter().enumerate() {
            if l != 0.0 {
                out.axpy(l, &self.g.column(j), 1.0);
            }
        }
        out
    }

    pub fn objective(&self, lambda: &[f64]) -> f64 {
        let gl = self.combine(lambda);
        let lin: f64 = lambda.iter().zip(self.e.iter()).map(|(l, e)| l * e).sum();
        gl.norm_squared() / (2.0 * self.r) - lin
    }

    fn gradient_from(&self, gl: &DVector<f64>) -> DVector<f64> {
        let mut d = self.g.tr_mul(gl) / self.r;
        d -= &self.e;
        d
    }

    pub fn gradient(&self, lambda: &[f64]) -> DVector<f64> {
        self.gradient_from(&self.combine(lambda))
    }

    /// Duality gap `Σ λ_i (d_i − min d)`, with `d` the dual gradient.
    pub fn duality_gap(&self, lambda: &[f64]) -> f64 {
        gap_from_gradient(lambda, &self.gradient(lambda))
    }

    /// Size of the rounding error in a computed gap: each `d_i` is a difference
    /// of terms as large as `|e_i| + ‖g_i‖ Σ λ_k ‖g_k‖ / r` (`Gλ` itself may
    /// cancel), so only planes carrying weight, or attaining the minimum, matter.
    fn rounding_floor(&self, lambda: &[f64], d: &DVector<f64>) -> f64 {
        let w = lambda
            .iter()
            .enumerate()
            .map(|(k, &l)| l * self.g.column(k).norm())
            .sum::<f64>()
            / self.r;
        let dmin = d.iter().copied().fold(f64::INFINITY, f64::min);
        let scale = (0..self.size())
            .filter(|&i| lambda[i] > 0.0 || d[i] == dmin)
            .map(|i| self.e[i].abs() + self.g.column(i).norm() * w)
            .fold(0.0, f64::max);
        64.0 * f64::EPSILON * scale
    }

    /// Largest eigenvalue of `GᵀG / r`, overestimated slightly.
    fn lipschitz(&self) -> f64 {
        let ggt = &self.g * self.g.transpose();
        let n = ggt.nrows();
        let frob = ggt.norm();
        if frob == 0.0 {
            return 0.0;
        }
        let mut v = DVector::from_fn(n, |i, _| 1.0 + (i as f64) * 1e-3);
        v /= v.norm();
        let mut est = 0.0;
        for _ in 0..100 {
            let w = &ggt * &v;
            let norm = w.norm();
            if norm == 0.0 {
                break;
            }
            let next = v.dot(&w);
            v = w / norm;
            if (next - est).abs() <= 1e-6 * next {
                est = next;
                break;
            }
            est = next;
        }
        (1.05 * est).min(frob).max(1e-300) / self.r
    }

    /// Minimizes the dual to duality gap `tol`, returning the best point found
    /// even when the iteration budget runs out.
    pub fn minimize(&self, tol: f64, warm: Option<&[f64]>, max_iterations: usize) -> DualSolution {
        let m = self.size();
        if m == 1 {
            return DualSolution {
                lambda: vec![1.0],
                gap: 0.0,
                iterations: 0,
                converged: true,
            };
        }
        if self.g.iter().all(|&v| v == 0.0) {
            // linear dual: any maximizer of e is optimal; lowest index wins ties
            let best = argmax_lowest(self.e.as_slice());
            let mut lambda = vec![0.0; m];
            lambda[best] = 1.0;
            return DualSolution {
                lambda,
                gap: 0.0,
                iterations: 0,
                converged: true,
            };
        }
        let warm = warm
            .filter(|w| w.len() == m && w.iter().all(|v| v.is_finite()))
            .map(project_simplex);

        let (mut best, mut best_gap, mut iterations) = match self.active_set(tol, warm.as_deref()) {
            Some((lambda, gap, its)) => (lambda, gap, its),
            None => {
                let start = warm.unwrap_or_else(|| vec![1.0 / m as f64; m]);
                let gap = self.duality_gap(&start);
                (start, gap, 0)
            }
        };
        if best_gap > tol && max_iterations > 0 {
            let (lambda, gap, its) = self.accelerated(tol, &best, max_iterations);
            iterations += its;
            if gap < best_gap {
                best = lambda;
                best_gap = gap;
            }
        }
        let floor = self.rounding_floor(&best, &self.gradient(&best));
        DualSolution {
            converged: best_gap <= tol.max(floor),
            lambda: best,
            gap: best_gap,
            iterations,
        }
    }

    pub fn solve(&self, tol: f64, warm: Option<&[f64]>) -> Result<DualSolution> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "KKT tolerance must be positive, got {tol}"
            )));
        }
        let sol = self.minimize(tol, warm, MAX_APG_ITERATIONS);
        if sol.converged {
            Ok(sol)
        } else {
            Err(Error::QpNotConverged {
                tol,
                iterations: sol.iterations,
                residual: sol.gap,
            })
        }
    }

    /// Differences `g_i − g_{S_0}` for the rest of the support, each scaled
    /// to unit length, with the scales.
    fn differences(&self, support: &[usize]) -> (DMatrix<f64>, Vec<f64>) {
        let base = self.g.column(support[0]);
        let mut d = DMatrix::zeros(self.g.nrows(), support.len() - 1);
        let mut scales = Vec::with_capacity(support.len() - 1);
        for (k, &i) in support[1..].iter().enumerate() {
            let col = self.g.column(i) - base;
            let norm = col.norm();
            scales.push(norm);
            if norm > 0.0 {
                d.set_column(k, &(col / norm));
            }
        }
        (d, scales)
    }

    /// Affine weights `u` (summing to one) with `Σ u_k g_{S_k} = g_j` when
    /// `g_j` lies in the affine hull of the support's slopes, else `None`.
    fn dependence(&self, support: &[usize], j: usize) -> Option<DVector<f64>> {
        let full = support.len() > self.g.nrows();
        let target = self.g.column(j) - self.g.column(support[0]);
        let mut u = DVector::zeros(support.len());
        if support.len() == 1 {
            u[0] = 1.0;
            return (full || target.iter().all(|&v| v == 0.0)).then_some(u);
        }
        let (d, scales) = self.differences(support);
        let svd = d.clone().svd(true, true);
        let cutoff = SVD_CUTOFF * svd.singular_values.max();
        let y = svd.solve(&target, cutoff).ok()?;
        let residual = (&d * &y - &target).norm();
        if !(full || residual <= DEPENDENCE_TOL * target.norm()) {
            return None;
        }
        let mut rest = 0.0;
        for k in 0..y.len() {
            let w = if scales[k] > 0.0 { y[k] / scales[k] } else { 0.0 };
            u[k + 1] = w;
            rest += w;
        }
        u[0] = 1.0 - rest;
        u.iter().all(|v| v.is_finite()).then_some(u)
    }

    /// Keeps the heaviest entries of `candidates` whose slopes are affinely
    /// independent.
    fn independent_subset(&self, candidates: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for &j in candidates {
            if out.len() > self.g.nrows() {
                break;
            }
            if out.is_empty() || self.dependence(&out, j).is_none() {
                out.push(j);
            }
        }
        out
    }

    /// Primal active-set method on the simplex.
    ///
    /// The support `S` always has affinely independent slopes, so the face
    /// system is nonsingular. A plane that would break independence enters by
    /// exchange: moving along the null direction keeps `‖Gλ‖` fixed, strictly
    /// lowers the objective, and drives one support weight to zero.
    fn active_set(&self, tol: f64, warm: Option<&[f64]>) -> Option<(Vec<f64>, f64, usize)> {
        let m = self.size();

        let vertex = || {
            let obj: Vec<f64> = (0..m)
                .map(|i| self.g.column(i).norm_squared() / (2.0 * self.r) - self.e[i])
                .collect();
            let mut best = 0;
            for i in 1..m {
                if obj[i] < obj[best] {
                    best = i;
                }
            }
            best
        };

        let mut lambda = vec![0.0; m];
        let mut support: Vec<usize> = Vec::new();
        if let Some(w) = warm {
            let mut order: Vec<usize> = (0..m).filter(|&i| w[i] > 0.0).collect();
            order.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b)));
            let cand = self.independent_subset(&order);
            if let Some(face) = self.face_minimizer(&cand) {
                if face.iter().all(|&v| v > 0.0) {
                    for (&i, &v) in cand.iter().zip(&face) {
                        lambda[i] = v;
                    }
                    support = cand;
                }
            }
        }
        if support.is_empty() {
            let j = vertex();
            lambda[j] = 1.0;
            support.push(j);
        }

        let mut best: Option<(Vec<f64>, f64)> = None;
        let budget = 20 * (m + self.g.nrows()) + 100;
        for it in 0..budget {
            let d = self.gradient(&lambda);
            let gap = gap_from_gradient(&lambda, &d);
            if best.as_ref().is_none_or(|(_, g)| gap < *g) {
                best = Some((lambda.clone(), gap));
            }
            if gap <= tol.max(self.rounding_floor(&lambda, &d)) {
                return Some((lambda, gap, it));
            }
            let level: f64 = support.iter().map(|&i| lambda[i] * d[i]).sum();
            let mut candidates: Vec<usize> = (0..m)
                .filter(|&i| !support.contains(&i) && d[i] < level)
                .collect();
            candidates.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
            // an independent plane enters directly; a dependent one only if the
            // exchange direction actually descends (duplicates never do)
            let mut step = None;
            for &j in &candidates {
                match self.dependence(&support, j) {
                    None => {
                        step = Some((j, None));
                        break;
                    }
                    Some(u) => {
                        let slope = d[j] - support.iter().zip(u.iter()).map(|(&i, uk)| uk * d[i]).sum::<f64>();
                        if slope < 0.0 {
                            step = Some((j, Some(u)));
                            break;
                        }
                    }
                }
            }
            let Some((j, dependent)) = step else {
                // right face; only the face solve's rounding remains
                self.polish(&support, &mut lambda);
                break;
            };

            if let Some(u) = dependent {
                // exchange along v = e_j − Σ u_k e_k (Gv = 0, 1ᵀv = 0)
                let mut t = f64::INFINITY;
                let mut leaving = None;
                for (k, &i) in support.iter().enumerate() {
                    if u[k] > 0.0 {
                        let ratio = lambda[i] / u[k];
                        if ratio < t {
                            t = ratio;
                            leaving = Some(k);
                        }
                    }
                }
                let leaving = leaving?;
                for (k, &i) in support.iter().enumerate() {
                    lambda[i] = (lambda[i] - t * u[k]).max(0.0);
                }
                lambda[support[leaving]] = 0.0;
                lambda[j] = t;
                support[leaving] = j;
            } else {
                support.push(j);
            }

            // minimize over the face, stepping back to the boundary while needed
            loop {
                let face = self.face_minimizer(&support)?;
                if face.iter().all(|&v| v >= 0.0) {
                    for (&i, &v) in support.iter().zip(&face) {
                        lambda[i] = v;
                    }
                    support.retain(|&i| lambda[i] > 0.0);
                    break;
                }
                let mut t = 1.0_f64;
                let mut leaving = None;
                for (k, &i) in support.iter().enumerate() {
                    if face[k] < 0.0 {
                        let ratio = lambda[i] / (lambda[i] - face[k]);
                        if ratio < t {
                            t = ratio;
                            leaving = Some(k);
                        }
                    }
                }
                let leaving = leaving?;
                if t == 0.0 && support[leaving] == j {
                    // the entering plane cannot move; numerical stall
                    return best.map(|(l, g)| (l, g, it));
                }
                for (k, &i) in support.iter().enumerate() {
                    lambda[i] += t * (face[k] - lambda[i]);
                }
                lambda[support[leaving]] = 0.0;
                support.retain(|&i| lambda[i] > 0.0);
                if support.is_empty() {
                    return best.map(|(l, g)| (l, g, it));
                }
            }
            let total: f64 = support.iter().map(|&i| lambda[i]).sum();
            for &i in &support {
                lambda[i] /= total;
            }
        }
        let d = self.gradient(&lambda);
        let gap = gap_from_gradient(&lambda, &d);
        match best {
            Some((l, g)) if g <= gap => Some((l, g, budget)),
            _ => Some((lambda, gap, budget)),
        }
    }

    /// Minimizer of the dual over the affine hull of the face `support`.
    ///
    /// With `λ = e_{S_0} + Σ y_k (e_{S_k} − e_{S_0})` the face problem is a
    /// least-squares system in the slope differences `D`; it is solved through
    /// a QR factorization of `D` so that slopes of wildly different sizes do
    /// not square the conditioning.
    fn face_minimizer(&self, support: &[usize]) -> Option<Vec<f64>> {
        let s = support.len();
        if s == 0 || s > self.g.nrows() + 1 {
            return None;
        }
        if s == 1 {
            return Some(vec![1.0]);
        }
        let (d, scales) = self.differences(support);
        if scales.iter().any(|&v| v == 0.0) {
            return None;
        }
        let base = self.g.column(support[0]).into_owned();
        let de = DVector::from_iterator(
            s - 1,
            support[1..]
                .iter()
                .zip(&scales)
                .map(|(&i, sc)| self.r * (self.e[i] - self.e[support[0]]) / sc),
        );
        let qr = d.clone().qr();
        let (q, rmat) = (qr.q(), qr.r());
        if rmat.diagonal().iter().any(|&v| v == 0.0 || !v.is_finite()) {
            return None;
        }
        // DᵀD y = r Δe − Dᵀ g_0  ⇔  R y = R⁻ᵀ (r Δe) − Qᵀ g_0
        let solve = |rhs: &DVector<f64>| -> Option<DVector<f64>> {
            let c = rmat.tr_solve_upper_triangular(rhs)?;
            rmat.solve_upper_triangular(&(c - q.tr_mul(&base)))
        };
        let mut y = solve(&de)?;
        // one step of iterative refinement on the normal equations
        let residual = &de - d.tr_mul(&(&base + &d * &y));
        if let Some(c) = rmat.tr_solve_upper_triangular(&residual) {
            if let Some(dy) = rmat.solve_upper_triangular(&c) {
                y = &y + &dy;
            }
        }
        let mut out = vec![0.0; s];
        let mut rest = 0.0;
        for k in 0..s - 1 {
            out[k + 1] = y[k] / scales[k];
            rest += out[k + 1];
        }
        out[0] = 1.0 - rest;
        out.iter().all(|v| v.is_finite()).then_some(out)
    }

    /// Newton corrections on a fixed face, each computed from a freshly
    /// evaluated dual gradient, kept while they lower the gap and stay feasible.
    fn polish(&self, support: &[usize], lambda: &mut [f64]) {
        let s = support.len();
        if s < 2 || s > self.g.nrows() + 1 {
            return;
        }
        let (d, scales) = self.differences(support);
        if scales.iter().any(|&v| v == 0.0) {
            return;
        }
        let rmat = d.qr().r();
        let mut gap = self.duality_gap(lambda);
        for _ in 0..3 {
            let grad = self.gradient(lambda);
            let g0 = grad[support[0]];
            let rhs = DVector::from_iterator(
                s - 1,
                support[1..]
                    .iter()
                    .zip(&scales)
                    .map(|(&i, sc)| -self.r * (grad[i] - g0) / sc),
            );
            let Some(dy) = rmat
                .tr_solve_upper_triangular(&rhs)
                .and_then(|c| rmat.solve_upper_triangular(&c))
            else {
                return;
            };
            let mut trial = lambda.to_vec();
            let mut moved = 0.0;
            for k in 0..s - 1 {
                let step = dy[k] / scales[k];
                trial[support[k + 1]] += step;
                moved += step;
            }
            trial[support[0]] -= moved;
            if support.iter().any(|&i| !(trial[i] >= 0.0)) {
                return;
            }
            let next = self.duality_gap(&trial);
            if !(next < gap) {
                return;
            }
            lambda.copy_from_slice(&trial);
            gap = next;
        }
    }

    /// Accelerated projected gradient with function-value restarts.
    fn accelerated(&self, tol: f64, start: &[f64], max_iterations: usize) -> (Vec<f64>, f64, usize) {
        let step = 1.0 / self.lipschitz();
        let mut lambda = start.to_vec();
        let mut best = lambda.clone();
        let mut best_gap = self.duality_gap(&lambda);
        let mut y = lambda.clone();
        let mut obj = self.objective(&lambda);
        let mut t = 1.0_f64;
        for it in 1..=max_iterations {
            let grad = self.gradient(&y);
            let trial: Vec<f64> = y.iter().zip(grad.iter()).map(|(yi, gi)| yi - step * gi).collect();
            let next = project_simplex(&trial);
            let next_obj = self.objective(&next);
            if next_obj > obj {
                y.clone_from(&lambda);
                t = 1.0;
                continue;
            }
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let beta = (t - 1.0) / t_next;
            y = next
                .iter()
                .zip(lambda.iter())
                .map(|(a, b)| a + beta * (a - b))
                .collect();
            lambda = next;
            obj = next_obj;
            t = t_next;
            if it % GAP_CHECK_EVERY == 0 || it == max_iterations {
                let d = self.gradient(&lambda);
                let gap = gap_from_gradient(&lambda, &d);
                if gap < best_gap {
                    best.clone_from(&lambda);
                    best_gap = gap;
                }
                if best_gap <= tol || gap <= self.rounding_floor(&lambda, &d) {
                    return (best, best_gap, it);
                }
            }
        }
        (best, best_gap, max_iterations)
    }
}

fn gap_from_gradient(lambda: &[f64], d: &DVector<f64>) -> f64 {
    let dmin = d.iter().copied().fold(f64::INFINITY, f64::min);
    lambda
        .iter()
        .zip(d.iter())
        .map(|(l, di)| l * (di - dmin))
        .sum::<f64>()
        .max(0.0)
}

fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Default KKT tolerance: `1e-10 (1 + |φ(z)|)`, scaled by the model value at
/// the centre so that far-off planes with huge offsets do not loosen it.
pub fn default_tolerance(bundle: &Bundle) -> f64 {
    1e-10 * (1.0 + centre_scale(bundle))
}

/// `|max_i e_i|`, the magnitude of the model at its own centre.
pub fn centre_scale(bundle: &Bundle) -> f64 {
    let z = bundle.prox_centre();
    bundle
        .elements()
        .iter()
        .map(|el| el.plane_at(z))
        .fold(f64::NEG_INFINITY, f64::max)
        .abs()
}

/// Prox of the bundle model at its prox-centre.
///
/// `warm` is an optional starting weight per bundle element (in element order).
pub fn prox_of_model(bundle: &Bundle, tol_kkt: f64, warm: Option<&[f64]>) -> Result<ProxSolution> {
    let qp = DualQp::from_bundle(bundle)?;
    let sol = qp.solve(tol_kkt, warm)?;
    let x_next = bundle.prox_centre() - qp.combine(&sol.lambda) / bundle.prox_param();
    Ok(ProxSolution {
        x_next,
        lambda: sol.lambda,
        kkt_residual: sol.gap,
        iterations: sol.iterations,
    })
}

/// Euclidean projection onto `{λ ≥ 0, Σλ = 1}` (sort-based threshold).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    assert!(!v.is_empty(), "cannot project an empty vector");
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut tau = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (j as f64 + 1.0);
        if u - candidate > 0.0 {
            tau = candidate;
        } else {
            break;
        }
    }
    let mut out: Vec<f64> = v.iter().map(|&x| (x - tau).max(0.0)).collect();
    // clean up rounding so the weights sum to one
    let total: f64 = out.iter().sum();
    if total > 0.0 && total != 1.0 {
        for o in out.iter_mut() {
            *o /= total;
        }
    }
    out
}

/// Distance from `g` to the convex hull of `points`.
///
/// Solves `min ‖Σλ_i (v_i − g)‖` over the simplex; the value returned is always
/// attained by a feasible hull point, so it never underestimates the distance.
pub fn dist_to_hull(g: &Vector, points: &[Vector]) -> f64 {
    assert!(!points.is_empty(), "hull of an empty set");
    if points.iter().any(|p| p == g) {
        return 0.0;
    }
    let n = g.len();
    let mut shifted = DMatrix::zeros(n, points.len());
    for (j, p) in points.iter().enumerate() {
        shifted.set_column(j, &(p - g));
    }
    let scale = shifted.amax().max(f64::MIN_POSITIVE);
    let qp = match DualQp::new(shifted / scale, DVector::zeros(points.len()), 1.0) {
        Ok(qp) => qp,
        Err(_) => return f64::NAN,
    };
    let sol = qp.minimize(1e-30, None, 5_000);
    qp.combine(&sol.lambda).norm() * scale
}
