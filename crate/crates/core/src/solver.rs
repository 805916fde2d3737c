//! The tilt-corrected proximal bundle loop.
//!
//! Each pass solves the prox of the current model, queries the oracle at the
//! new point, and stops once `(f(x_{k+1}) − φ_k(x_{k+1}))/r ≤ s_tol²`. Otherwise
//! the aggregate plane is built from the model just used, the new linearization
//! is tilt-corrected so it passes no higher than `f(z)` at `z`, and the bundle
//! is trimmed by the selected variant. On exit the point is within
//! `s_tol + ε/r` of the true prox whenever the oracle error is below `ε`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::model::{
    eval_model, aggregate_from_weights, select_bundle, tilt_correct, Bundle, BundleElement, BundleVariant,
    AGGREGATE_INDEX, CENTRE_INDEX,
};
use crate::oracles::{Oracle, OracleResponse};
use crate::prox_qp::{centre_scale, default_tolerance, prox_of_model};
use crate::Vector;

/// Absolute slack allowed in the merit-function checks.
pub const MERIT_TOL: f64 = 1e-8;
/// Relative slack allowed in the model-anchoring check at `z`.
/// Fraction of `r·s_tol²` allowed as subproblem duality gap.
const QP_TOL_FRACTION: f64 = 1e-4;
pub const ANCHOR_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub prox_centre: Vector,
    pub prox_param: f64,
    pub stop_tol: f64,
    pub variant: BundleVariant,
    pub max_iterations: usize,
    pub record_trace: bool,
    /// Oracle error level; only used for the reported error bound.
    pub eps: f64,
    /// Overrides the prox subproblem tolerance.
    pub qp_tol: Option<f64>,
}

/// Iteration caps: `100n` for low-dimension runs, `20n` for high-dimension runs.
pub fn default_max_iterations(n: usize, high_dimension: bool) -> usize {
    if high_dimension {
        20 * n
    } else {
        100 * n
    }
}

impl SolverConfig {
    /// `r = 1`, `s_tol = 1e-3`, the `(k+2)`-bundle, and a `100n` cap.
    pub fn new(prox_centre: Vector) -> Self {
        let n = prox_centre.len();
        Self {
            prox_centre,
            prox_param: 1.0,
            stop_tol: 1e-3,
            variant: BundleVariant::Full,
            max_iterations: default_max_iterations(n, false).max(1),
            record_trace: true,
            eps: 0.0,
            qp_tol: None,
        }
    }

    pub fn prox_param(mut self, r: f64) -> Self {
        self.prox_param = r;
        self
    }

    pub fn stop_tol(mut self, s_tol: f64) -> Self {
        self.stop_tol = s_tol;
        self
    }

    pub fn variant(mut self, variant: BundleVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn max_iterations(mut self, cap: usize) -> Self {
        self.max_iterations = cap;
        self
    }

    pub fn record_trace(mut self, on: bool) -> Self {
        self.record_trace = on;
        self
    }

    pub fn eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite(self.prox_centre.as_slice(), "prox centre")?;
        if self.prox_centre.is_empty() {
            return Err(Error::InvalidParameter("empty prox centre".into()));
        }
        if !(self.prox_param > 0.0) || !self.prox_param.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "prox parameter must be positive, got {}",
                self.prox_param
            )));
        }
        if !(self.stop_tol >= 0.0) || !self.stop_tol.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "stopping tolerance must be nonnegative, got {}",
                self.stop_tol
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be positive".into()));
        }
        if !(self.eps >= 0.0) {
            return Err(Error::InvalidParameter(format!("eps must be nonnegative, got {}", self.eps)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub x_next: Vector,
    /// `φ_k(x_{k+1})`.
    pub model_value: f64,
    /// `φ_k(x_{k+1}) + (r/2)‖z − x_{k+1}‖²`.
    pub merit: f64,
    /// `(f(x_{k+1}) − φ_k(x_{k+1}))/r`.
    pub gap: f64,
    pub f_next: f64,
    /// Whether the newest plane of model `k` was tilt-corrected.
    pub tilt_corrected: bool,
    pub bundle_size: usize,
    /// `φ_k(z)`, which must equal `f(z)`.
    pub centre_model_value: f64,
    pub kkt_residual: f64,
    /// `‖r(z − x_{k+1}) − Gλ‖ / max(‖Gλ‖, 1)`.
    pub recombination_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ToleranceMet,
    IterationCap,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub x_out: Vector,
    pub f_out: f64,
    pub f_centre: f64,
    pub stop_reason: StopReason,
    pub iterations: usize,
    pub tilt_corrections: usize,
    pub trace: Vec<IterationRecord>,
    /// Bound on `‖x_out − Prox(z)‖` from the final gap and the configured `eps`.
    pub error_bound: f64,
    /// `(f(x_out) − φ(x_out))/r` at exit.
    pub final_gap: f64,
}

impl SolveResult {
    pub fn converged(&self) -> bool {
        self.stop_reason == StopReason::ToleranceMet
    }
}

/// `(f_next − model_value)/r ≤ s_tol²`. A negative gap also stops.
pub fn stopping_test(f_next: f64, model_value: f64, r: f64, s_tol: f64) -> bool {
    (f_next - model_value) / r <= s_tol * s_tol
}

/// `sqrt((f − φ + ε²/(4r))/r) + ε/(2r)`, with `f − φ` clamped at zero.
pub fn error_bound(model_gap: f64, eps: f64, r: f64) -> f64 {
    let gap = model_gap.max(0.0);
    ((gap + eps * eps / (4.0 * r)) / r).sqrt() + eps / (2.0 * r)
}

fn checked_query<O: Oracle>(oracle: &mut O, x: &Vector) -> Result<OracleResponse> {
    let resp = oracle.query(x)?;
    ensure_finite(&[resp.value], "oracle value")?;
    ensure_finite(resp.subgrad_approx.as_slice(), "oracle subgradient")?;
    if resp.subgrad_approx.len() != x.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            got: resp.subgrad_approx.len(),
        });
    }
    Ok(resp)
}

pub fn run<O: Oracle>(oracle: &mut O, config: &SolverConfig) -> Result<SolveResult> {
    config.validate()?;
    let n = config.prox_centre.len();
    if oracle.dimension() != n {
        return Err(Error::Dimension {
            expected: oracle.dimension(),
            got: n,
        });
    }
    let z = config.prox_centre.clone();
    let r = config.prox_param;

    let first = checked_query(oracle, &z)?;
    let f_z = first.value;
    let (g0, _) = tilt_correct(&z, f_z, &z, f_z, &first.subgrad_approx)?;
    let mut bundle = Bundle::new(
        z.clone(),
        r,
        BundleElement::new(CENTRE_INDEX, z.clone(), f_z, g0),
    )?;

    let mut trace = Vec::new();
    let mut warm: Option<Vec<f64>> = None;
    let mut tilt_corrections = 0;
    let mut newest_corrected = false;
    let mut k = 0usize;
    loop {
        let tol = config.qp_tol.unwrap_or_else(|| qp_tolerance(&bundle, r, config.stop_tol));
        let sol = prox_of_model(&bundle, tol, warm.as_deref())?;
        let x_next = sol.x_next;
        let eval = eval_model(&bundle, &x_next)?;
        let phi = eval.value;
        let resp = checked_query(oracle, &x_next)?;
        let f_next = resp.value;
        let gap = (f_next - phi) / r;
        if config.record_trace {
            trace.push(IterationRecord {
                k,
                x_next: x_next.clone(),
                model_value: phi,
                merit: phi + 0.5 * r * (&z - &x_next).norm_squared(),
                gap,
                f_next,
                tilt_corrected: newest_corrected,
                bundle_size: bundle.len(),
                centre_model_value: eval_model(&bundle, &z)?.value,
                kkt_residual: sol.kkt_residual,
                recombination_residual: recombination_residual(&bundle, &sol.lambda, &x_next),
            });
        }

        let iterations = k + 1;
        let stop = if stopping_test(f_next, phi, r, config.stop_tol) {
            Some(StopReason::ToleranceMet)
        } else if iterations >= config.max_iterations {
            Some(StopReason::IterationCap)
        } else {
            None
        };
        if let Some(stop_reason) = stop {
            return Ok(SolveResult {
                x_out: x_next,
                f_out: f_next,
                f_centre: f_z,
                stop_reason,
                iterations,
                tilt_corrections,
                trace,
                error_bound: error_bound(f_next - phi, config.eps, r),
                final_gap: gap,
            });
        }

        let newest = iterations as i64;
        let aggregate = aggregate_from_weights(&bundle, &sol.lambda, &x_next)?;
        let keep = select_bundle(config.variant, &bundle, &eval, newest);
        let (g, report) = tilt_correct(&z, f_z, &x_next, f_next, &resp.subgrad_approx)?;
        if report.corrected {
            tilt_corrections += 1;
        }
        newest_corrected = report.corrected;

        let previous: HashMap<i64, f64> = bundle
            .elements()
            .iter()
            .map(|e| e.index)
            .zip(sol.lambda.iter().copied())
            .collect();
        bundle.retain(&keep);
        bundle.insert(aggregate)?;
        bundle.insert(BundleElement::new(newest, x_next, f_next, g))?;
        warm = Some(warm_start(&bundle, &previous, newest));
        k += 1;
    }
}

/// Keeps the subproblem error well inside the stopping test, but never below
/// what double precision can resolve at the model's scale.
fn qp_tolerance(bundle: &Bundle, r: f64, s_tol: f64) -> f64 {
    let floor = 1e-14 * (1.0 + centre_scale(bundle));
    default_tolerance(bundle).min(QP_TOL_FRACTION * r * s_tol * s_tol).max(floor)
}

fn recombination_residual(bundle: &Bundle, lambda: &[f64], x_next: &Vector) -> f64 {
    let mut combined = Vector::zeros(x_next.len());
    for (el, &l) in bundle.elements().iter().zip(lambda) {
        combined.axpy(l, &el.subgrad, 1.0);
    }
    let lhs = (bundle.prox_centre() - x_next) * bundle.prox_param();
    (lhs - &combined).norm() / combined.norm().max(1.0)
}

/// Previous weights on surviving planes; the aggregate inherits the weight of
/// everything dropped (it summarizes those planes) and the new plane gets `1/m`.
fn warm_start(bundle: &Bundle, previous: &HashMap<i64, f64>, newest: i64) -> Vec<f64> {
    let m = bundle.len() as f64;
    let kept: f64 = bundle
        .elements()
        .iter()
        .filter(|e| e.index != AGGREGATE_INDEX)
        .filter_map(|e| previous.get(&e.index))
        .sum();
    let mut w: Vec<f64> = bundle
        .elements()
        .iter()
        .map(|e| {
            if e.index == newest {
                1.0 / m
            } else if e.index == AGGREGATE_INDEX {
                (1.0 - kept).max(0.0)
            } else {
                previous.get(&e.index).copied().unwrap_or(0.0)
            }
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

#[derive(Clone, Debug, PartialEq)]
pub enum TraceViolation {
    /// `φ_k(z) ≠ f(z)`.
    Anchoring { k: usize, deviation: f64 },
    /// `Φ(k) > f(z)`.
    MeritAboveCentre { k: usize, excess: f64 },
    /// `Φ(k+1) < Φ(k) + (r/2)‖x_{k+2} − x_{k+1}‖²`.
    MeritDecrease { k: usize, shortfall: f64 },
}

impl TraceViolation {
    /// Iteration the violation refers to.
    pub fn k(&self) -> usize {
        match *self {
            TraceViolation::Anchoring { k, .. }
            | TraceViolation::MeritAboveCentre { k, .. }
            | TraceViolation::MeritDecrease { k, .. } => k,
        }
    }
}

/// Checks model anchoring at `z` and merit monotonicity along a recorded trace.
///
/// Merit checks allow `MERIT_TOL` plus the slack implied by each record's
/// subproblem duality gap.
pub fn check_trace(result: &SolveResult, r: f64) -> Vec<TraceViolation> {
    let f_z = result.f_centre;
    let mut out = Vec::new();
    for rec in &result.trace {
        let deviation = (rec.centre_model_value - f_z).abs();
        if deviation > ANCHOR_TOL * (1.0 + f_z.abs()) {
            out.push(TraceViolation::Anchoring { k: rec.k, deviation });
        }
        if rec.merit > f_z + MERIT_TOL + rec.kkt_residual {
            out.push(TraceViolation::MeritAboveCentre {
                k: rec.k,
                excess: rec.merit - f_z,
            });
        }
    }
    for pair in result.trace.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let step = (&b.x_next - &a.x_next).norm();
        let shortfall = a.merit + 0.5 * r * step * step - b.merit;
        if shortfall > MERIT_TOL + subproblem_slack(a.kkt_residual, b.kkt_residual, step, r) {
            out.push(TraceViolation::MeritDecrease { k: a.k, shortfall });
        }
    }
    out
}

/// How far inexact subproblem solutions can bend the merit inequality: a
/// duality gap `g` puts the merit within `g` of its optimum and the point
/// within `sqrt(2g/r)` of the exact prox.
fn subproblem_slack(gap_a: f64, gap_b: f64, step: f64, r: f64) -> f64 {
    let drift = (2.0 * gap_a / r).sqrt() + (2.0 * gap_b / r).sqrt();
    gap_a + r * step * drift + 0.5 * r * drift * drift
}
