//! First-order oracles: exact, ball-noise, and forward simplex gradients.
//!
//! Every oracle returns the exact function value. The subgradient is either the
//! gradient of the first active smooth piece, that gradient plus a point drawn
//! uniformly from the ball of radius `eps`, or a linear-interpolation gradient
//! built from `n + 1` function values.

use crate::error::{ensure_finite, Error, Result};
use crate::rng::RngState;
use crate::Vector;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResponse {
    pub value: f64,
    pub subgrad_approx: Vector,
    /// Error radius the response claims for `subgrad_approx`.
    pub eps_declared: f64,
}

pub trait Oracle {
    fn dimension(&self) -> usize;
    fn query(&mut self, x: &Vector) -> Result<OracleResponse>;
}

impl<O: Oracle + ?Sized> Oracle for &mut O {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn query(&mut self, x: &Vector) -> Result<OracleResponse> {
        (**self).query(x)
    }
}

/// A finite max of smooth convex pieces.
pub trait PiecewiseSmooth {
    fn dimension(&self) -> usize;

    fn value(&self, x: &Vector) -> Result<f64>;

    /// Value of the function and gradient of its lowest-index active piece.
    fn first_active(&self, x: &Vector) -> Result<(f64, Vector)>;
}

impl<P: PiecewiseSmooth + ?Sized> PiecewiseSmooth for &P {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn value(&self, x: &Vector) -> Result<f64> {
        (**self).value(x)
    }

    fn first_active(&self, x: &Vector) -> Result<(f64, Vector)> {
        (**self).first_active(x)
    }
}

fn check_point(x: &Vector, n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: x.len(),
        });
    }
    ensure_finite(x.as_slice(), "query point")
}

/// `radius · u^{1/n} · w/‖w‖` with `w` standard normal and `u` uniform on (0, 1).
pub fn sample_ball(rng: &mut RngState, n: usize, radius: f64) -> Vector {
    assert!(n >= 1, "ball dimension must be positive");
    assert!(radius >= 0.0, "ball radius must be nonnegative");
    let w = loop {
        let w = Vector::from_fn(n, |_, _| rng.normal());
        if w.norm() > 0.0 {
            break w;
        }
    };
    let u = rng.uniform_open();
    if radius == 0.0 {
        return Vector::zeros(n);
    }
    let scale = radius * u.powf(1.0 / n as f64) / w.norm();
    w * scale
}

/// Exact first-active gradient.
#[derive(Clone, Debug)]
pub struct ExactOracle<P> {
    function: P,
}

impl<P: PiecewiseSmooth> ExactOracle<P> {
    pub fn new(function: P) -> Self {
        Self { function }
    }
}

impl<P: PiecewiseSmooth> Oracle for ExactOracle<P> {
    fn dimension(&self) -> usize {
        self.function.dimension()
    }

    fn query(&mut self, x: &Vector) -> Result<OracleResponse> {
        check_point(x, self.dimension())?;
        let (value, grad) = self.function.first_active(x)?;
        Ok(OracleResponse {
            value,
            subgrad_approx: grad,
            eps_declared: 0.0,
        })
    }
}

/// First-active gradient perturbed by a uniform draw from the `eps` ball.
#[derive(Clone, Debug)]
pub struct BallNoiseOracle<P> {
    function: P,
    eps: f64,
    rng: RngState,
}

impl<P: PiecewiseSmooth> BallNoiseOracle<P> {
    pub fn new(function: P, eps: f64, rng: RngState) -> Result<Self> {
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "eps must be a nonnegative number, got {eps}"
            )));
        }
        Ok(Self { function, eps, rng })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn rng(&self) -> &RngState {
        &self.rng
    }
}

impl<P: PiecewiseSmooth> Oracle for BallNoiseOracle<P> {
    fn dimension(&self) -> usize {
        self.function.dimension()
    }

    fn query(&mut self, x: &Vector) -> Result<OracleResponse> {
        let n = self.dimension();
        check_point(x, n)?;
        let (value, grad) = self.function.first_active(x)?;
        let noise = sample_ball(&mut self.rng, n, self.eps);
        Ok(OracleResponse {
            value,
            subgrad_approx: grad + noise,
            eps_declared: self.eps,
        })
    }
}

pub fn default_simplex_delta(x: &Vector) -> f64 {
    1e-5 * (1.0 + x.norm())
}

/// Forward simplex gradient `g_j = (f(x + δe_j) − f(x))/δ`.
///
/// When `known_nonconstant` is set and every difference vanishes, the step is
/// judged too small and an error is returned.
pub fn simplex_gradient<F>(f: F, x: &Vector, delta: f64, known_nonconstant: bool) -> Result<(f64, Vector)>
where
    F: Fn(&Vector) -> Result<f64>,
{
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "simplex step must be positive, got {delta}"
        )));
    }
    let fx = f(x)?;
    ensure_finite(&[fx], "function value")?;
    let mut grad = Vector::zeros(x.len());
    let mut probe = x.clone();
    for j in 0..x.len() {
        probe[j] = x[j] + delta;
        let step = probe[j] - x[j];
        if step == 0.0 {
            return Err(Error::DegenerateSimplexGradient(format!(
                "step {delta:e} vanishes at coordinate {j}"
            )));
        }
        let fj = f(&probe)?;
        ensure_finite(&[fj], "function value")?;
        grad[j] = (fj - fx) / step;
        probe[j] = x[j];
    }
    if known_nonconstant && grad.iter().all(|&g| g == 0.0) {
        return Err(Error::DegenerateSimplexGradient(format!(
            "all differences vanished with delta = {delta:e}"
        )));
    }
    Ok((fx, grad))
}

/// Derivative-free oracle from forward simplex gradients.
#[derive(Clone, Debug)]
pub struct SimplexGradientOracle<P> {
    function: P,
    delta: Option<f64>,
    eps_declared: f64,
    known_nonconstant: bool,
}

impl<P: PiecewiseSmooth> SimplexGradientOracle<P> {
    /// `delta = None` uses `1e-5 (1 + ‖x‖)` at each query.
    pub fn new(function: P, delta: Option<f64>, eps_declared: f64) -> Self {
        Self {
            function,
            delta,
            eps_declared,
            known_nonconstant: false,
        }
    }

    pub fn known_nonconstant(mut self, flag: bool) -> Self {
        self.known_nonconstant = flag;
        self
    }
}

impl<P: PiecewiseSmooth> Oracle for SimplexGradientOracle<P> {
    fn dimension(&self) -> usize {
        self.function.dimension()
    }

    fn query(&mut self, x: &Vector) -> Result<OracleResponse> {
        check_point(x, self.dimension())?;
        let delta = self.delta.unwrap_or_else(|| default_simplex_delta(x));
        let (value, grad) = simplex_gradient(
            |p| self.function.value(p),
            x,
            delta,
            self.known_nonconstant,
        )?;
        Ok(OracleResponse {
            value,
            subgrad_approx: grad,
            eps_declared: self.eps_declared,
        })
    }
}

/// Oracle backed by a closure returning `(f(x), g̃(x))`.
pub struct FnOracle<F> {
    n: usize,
    eps_declared: f64,
    f: F,
}

impl<F> FnOracle<F>
where
    F: FnMut(&Vector) -> (f64, Vector),
{
    pub fn new(n: usize, eps_declared: f64, f: F) -> Self {
        Self { n, eps_declared, f }
    }
}

impl<F> Oracle for FnOracle<F>
where
    F: FnMut(&Vector) -> (f64, Vector),
{
    fn dimension(&self) -> usize {
        self.n
    }

    fn query(&mut self, x: &Vector) -> Result<OracleResponse> {
        check_point(x, self.n)?;
        let (value, subgrad_approx) = (self.f)(x);
        if subgrad_approx.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: subgrad_approx.len(),
            });
        }
        Ok(OracleResponse {
            value,
            subgrad_approx,
            eps_declared: self.eps_declared,
        })
    }
}
