//! Convex finite-max test functions for the derivative-free experiments.
//!
//! Each function is a max of smooth convex pieces, so it can serve both a
//! value-only oracle and an exact first-active-gradient oracle.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracles::PiecewiseSmooth;
use crate::Vector;

const P_ALPHA: f64 = 10_000.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunction {
    PAlpha,
    Dem,
    Wong3Adj,
    Cb2,
    Mifflin2,
    Evd52Adj,
    Oet6Adj,
    MaxExp,
    MaxLog,
    Max10,
}

impl TestFunction {
    pub const ALL: [TestFunction; 10] = [
        TestFunction::PAlpha,
        TestFunction::Dem,
        TestFunction::Wong3Adj,
        TestFunction::Cb2,
        TestFunction::Mifflin2,
        TestFunction::Evd52Adj,
        TestFunction::Oet6Adj,
        TestFunction::MaxExp,
        TestFunction::MaxLog,
        TestFunction::Max10,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestFunction::PAlpha => "p_alpha",
            TestFunction::Dem => "dem",
            TestFunction::Wong3Adj => "wong3_adj",
            TestFunction::Cb2 => "cb2",
            TestFunction::Mifflin2 => "mifflin2",
            TestFunction::Evd52Adj => "evd52_adj",
            TestFunction::Oet6Adj => "oet6_adj",
            TestFunction::MaxExp => "maxexp",
            TestFunction::MaxLog => "maxlog",
            TestFunction::Max10 => "max10",
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            TestFunction::PAlpha
            | TestFunction::Dem
            | TestFunction::Cb2
            | TestFunction::Mifflin2 => 2,
            TestFunction::Evd52Adj => 3,
            TestFunction::Oet6Adj => 4,
            TestFunction::Max10 => 10,
            TestFunction::MaxExp => 12,
            TestFunction::Wong3Adj => 20,
            TestFunction::MaxLog => 30,
        }
    }

    pub fn piece_count(self) -> usize {
        match self {
            TestFunction::PAlpha | TestFunction::Mifflin2 => 2,
            TestFunction::Dem | TestFunction::Cb2 => 3,
            TestFunction::Evd52Adj => 6,
            TestFunction::Wong3Adj => 18,
            TestFunction::Oet6Adj => 21,
            TestFunction::MaxExp => 12,
            TestFunction::MaxLog => 30,
            TestFunction::Max10 => 10,
        }
    }

    /// Default prox-centre: the all-ones vector.
    pub fn default_centre(self) -> Vector {
        Vector::from_element(self.dimension(), 1.0)
    }

    pub fn in_domain(self, x: &Vector) -> bool {
        x.len() == self.dimension()
            && x.iter().all(|v| v.is_finite())
            && (self != TestFunction::MaxLog || x.iter().all(|&v| v > 0.0))
    }

    fn check(self, x: &Vector) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(Error::Dimension {
                expected: self.dimension(),
                got: x.len(),
            });
        }
        if !self.in_domain(x) {
            return Err(Error::Domain(format!(
                "{} needs finite{} coordinates",
                self.name(),
                if self == TestFunction::MaxLog { ", strictly positive" } else { "" }
            )));
        }
        Ok(())
    }

    /// Value and gradient of every piece at `x`.
    pub fn pieces(self, x: &Vector) -> Result<Vec<(f64, Vector)>> {
        self.check(x)?;
        let n = self.dimension();
        let mut out = Vec::with_capacity(self.piece_count());
        let grad = |entries: &[(usize, f64)]| {
            let mut g = Vector::zeros(n);
            for &(i, v) in entries {
                g[i] += v;
            }
            g
        };
        match self {
            TestFunction::PAlpha => {
                let (x1, x2) = (x[0], x[1]);
                out.push((x1 * x1 + P_ALPHA * x2, grad(&[(0, 2.0 * x1), (1, P_ALPHA)])));
                out.push((x1 * x1 - P_ALPHA * x2, grad(&[(0, 2.0 * x1), (1, -P_ALPHA)])));
            }
            TestFunction::Dem => {
                let (x1, x2) = (x[0], x[1]);
                out.push((5.0 * x1 + x2, grad(&[(0, 5.0), (1, 1.0)])));
                out.push((-5.0 * x1 + x2, grad(&[(0, -5.0), (1, 1.0)])));
                out.push((
                    x1 * x1 + x2 * x2 + 4.0 * x2,
                    grad(&[(0, 2.0 * x1), (1, 2.0 * x2 + 4.0)]),
                ));
            }
            TestFunction::Cb2 => {
                let (x1, x2) = (x[0], x[1]);
                out.push((x1 * x1 + x2.powi(4), grad(&[(0, 2.0 * x1), (1, 4.0 * x2.powi(3))])));
                out.push((
                    (2.0 - x1).powi(2) + (2.0 - x2).powi(2),
                    grad(&[(0, -2.0 * (2.0 - x1)), (1, -2.0 * (2.0 - x2))]),
                ));
                let e = 2.0 * (x2 - x1).exp();
                out.push((e, grad(&[(0, -e), (1, e)])));
            }
            TestFunction::Mifflin2 => {
                // −x1 + 2u + 1.75|u| = max(−x1 + 3.75u, −x1 + 0.25u), u = ‖x‖² − 1
                let (x1, x2) = (x[0], x[1]);
                let u = x1 * x1 + x2 * x2 - 1.0;
                for c in [3.75, 0.25] {
                    out.push((-x1 + c * u, grad(&[(0, -1.0 + 2.0 * c * x1), (1, 2.0 * c * x2)])));
                }
            }
            TestFunction::Evd52Adj => {
                let (x1, x2, x3) = (x[0], x[1], x[2]);
                out.push((
                    x1 * x1 + x2 * x2 + x3 * x3 - 1.0,
                    grad(&[(0, 2.0 * x1), (1, 2.0 * x2), (2, 2.0 * x3)]),
                ));
                out.push((
                    x1 * x1 + x2 * x2 + (x3 - 2.0).powi(2),
                    grad(&[(0, 2.0 * x1), (1, 2.0 * x2), (2, 2.0 * (x3 - 2.0))]),
                ));
                out.push((x1 + x2 + x3 - 1.0, grad(&[(0, 1.0), (1, 1.0), (2, 1.0)])));
                out.push((x1 + x2 - x3 + 1.0, grad(&[(0, 1.0), (1, 1.0), (2, -1.0)])));
                let w = 5.0 * x3 - x1 + 1.0;
                out.push((
                    2.0 * x1.powi(4) + 6.0 * x2 * x2 + 2.0 * w * w,
                    grad(&[(0, 8.0 * x1.powi(3) - 4.0 * w), (1, 12.0 * x2), (2, 20.0 * w)]),
                ));
                out.push((x1 * x1 - 9.0 * x3, grad(&[(0, 2.0 * x1), (2, -9.0)])));
            }
            TestFunction::Oet6Adj => {
                let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
                for i in 0..21 {
                    let t = -0.5 + i as f64 / 20.0;
                    let (e3, e4) = ((x3 * t).exp(), (x4 * t).exp());
                    out.push((
                        x1 + e3 + x2 + e4 - 1.0 / (1.0 + t),
                        grad(&[(0, 1.0), (1, 1.0), (2, t * e3), (3, t * e4)]),
                    ));
                }
            }
            TestFunction::MaxExp => {
                for i in 0..n {
                    let v = (i + 1) as f64 * x[i].exp();
                    out.push((v, grad(&[(i, v)])));
                }
            }
            TestFunction::MaxLog => {
                for i in 0..n {
                    let w = (i + 1) as f64;
                    out.push((-w * x[i].ln(), grad(&[(i, -w / x[i])])));
                }
            }
            TestFunction::Max10 => {
                for i in 0..n {
                    let w = (i + 1) as f64;
                    out.push((w * x[i].powi(10), grad(&[(i, 10.0 * w * x[i].powi(9))])));
                }
            }
            TestFunction::Wong3Adj => wong3_pieces(x, &mut out),
        }
        Ok(out)
    }

    pub fn eval(self, x: &Vector) -> Result<f64> {
        Ok(self
            .pieces(x)?
            .into_iter()
            .map(|(v, _)| v)
            .fold(f64::NEG_INFINITY, f64::max))
    }
}

/// Wong 3 with `x1·x2` dropped from the base piece and `−2·x1·x2` from the
/// fifth constraint, which makes every piece convex.
fn wong3_pieces(x: &Vector, out: &mut Vec<(f64, Vector)>) {
    let n = 20;
    let v = |i: usize| x[i - 1];
    let sq = |t: f64| t * t;

    let mut g1 = Vector::zeros(n);
    let f1 = sq(v(1)) + sq(v(2)) - 14.0 * v(1) - 16.0 * v(2)
        + sq(v(3) - 10.0)
        + 4.0 * sq(v(4) - 5.0)
        + sq(v(5) - 3.0)
        + 2.0 * sq(v(6) - 1.0)
        + 5.0 * sq(v(7))
        + 7.0 * sq(v(8) - 11.0)
        + 2.0 * sq(v(9) - 10.0)
        + sq(v(10) - 7.0)
        + sq(v(11) - 9.0)
        + 10.0 * sq(v(12) - 1.0)
        + 5.0 * sq(v(13) - 7.0)
        + 4.0 * sq(v(14) - 14.0)
        + 27.0 * sq(v(15) - 1.0)
        + v(16).powi(4)
        + sq(v(17) - 2.0)
        + 13.0 * sq(v(18) - 2.0)
        + sq(v(19) - 3.0)
        + sq(v(20))
        + 95.0;
    let base_grad = [
        (1, 2.0 * v(1) - 14.0),
        (2, 2.0 * v(2) - 16.0),
        (3, 2.0 * (v(3) - 10.0)),
        (4, 8.0 * (v(4) - 5.0)),
        (5, 2.0 * (v(5) - 3.0)),
        (6, 4.0 * (v(6) - 1.0)),
        (7, 10.0 * v(7)),
        (8, 14.0 * (v(8) - 11.0)),
        (9, 4.0 * (v(9) - 10.0)),
        (10, 2.0 * (v(10) - 7.0)),
        (11, 2.0 * (v(11) - 9.0)),
        (12, 20.0 * (v(12) - 1.0)),
        (13, 10.0 * (v(13) - 7.0)),
        (14, 8.0 * (v(14) - 14.0)),
        (15, 54.0 * (v(15) - 1.0)),
        (16, 4.0 * v(16).powi(3)),
        (17, 2.0 * (v(17) - 2.0)),
        (18, 26.0 * (v(18) - 2.0)),
        (19, 2.0 * (v(19) - 3.0)),
        (20, 2.0 * v(20)),
    ];
    for (i, d) in base_grad {
        g1[i - 1] = d;
    }
    out.push((f1, g1.clone()));

    // (value, sparse gradient) of each constraint term; piece = f1 + 10·term
    let terms: Vec<(f64, Vec<(usize, f64)>)> = vec![
        (
            3.0 * sq(v(1) - 2.0) + 4.0 * sq(v(2) - 3.0) + 2.0 * sq(v(3)) - 7.0 * v(4) - 120.0,
            vec![(1, 6.0 * (v(1) - 2.0)), (2, 8.0 * (v(2) - 3.0)), (3, 4.0 * v(3)), (4, -7.0)],
        ),
        (
            5.0 * sq(v(1)) + 8.0 * v(2) + sq(v(3) - 6.0) - 2.0 * v(4) - 40.0,
            vec![(1, 10.0 * v(1)), (2, 8.0), (3, 2.0 * (v(3) - 6.0)), (4, -2.0)],
        ),
        (
            0.5 * sq(v(1) - 8.0) + 2.0 * sq(v(2) - 4.0) + 3.0 * sq(v(5)) - v(6) - 30.0,
            vec![(1, v(1) - 8.0), (2, 4.0 * (v(2) - 4.0)), (5, 6.0 * v(5)), (6, -1.0)],
        ),
        (
            sq(v(1)) + 2.0 * sq(v(2) - 2.0) + 14.0 * v(5) - 6.0 * v(6),
            vec![(1, 2.0 * v(1)), (2, 4.0 * (v(2) - 2.0)), (5, 14.0), (6, -6.0)],
        ),
        (
            4.0 * v(1) + 5.0 * v(2) - 3.0 * v(7) + 9.0 * v(8) - 105.0,
            vec![(1, 4.0), (2, 5.0), (7, -3.0), (8, 9.0)],
        ),
        (
            10.0 * v(1) - 8.0 * v(2) - 17.0 * v(7) + 2.0 * v(8),
            vec![(1, 10.0), (2, -8.0), (7, -17.0), (8, 2.0)],
        ),
        (
            -3.0 * v(1) + 6.0 * v(2) + 12.0 * sq(v(9) - 8.0) - 7.0 * v(10),
            vec![(1, -3.0), (2, 6.0), (9, 24.0 * (v(9) - 8.0)), (10, -7.0)],
        ),
        (
            -8.0 * v(1) + 2.0 * v(2) + 5.0 * v(9) - 2.0 * v(10) - 12.0,
            vec![(1, -8.0), (2, 2.0), (9, 5.0), (10, -2.0)],
        ),
        (
            v(1) + v(2) + 4.0 * v(11) - 21.0 * v(12),
            vec![(1, 1.0), (2, 1.0), (11, 4.0), (12, -21.0)],
        ),
        (
            sq(v(1)) + 15.0 * v(11) - 8.0 * v(12) - 28.0,
            vec![(1, 2.0 * v(1)), (11, 15.0), (12, -8.0)],
        ),
        (
            4.0 * v(1) + 9.0 * v(2) + 5.0 * sq(v(13)) - 9.0 * v(14) - 87.0,
            vec![(1, 4.0), (2, 9.0), (13, 10.0 * v(13)), (14, -9.0)],
        ),
        (
            3.0 * v(1) + 4.0 * v(2) + 3.0 * sq(v(13) - 6.0) - 14.0 * v(14) - 10.0,
            vec![(1, 3.0), (2, 4.0), (13, 6.0 * (v(13) - 6.0)), (14, -14.0)],
        ),
        (
            14.0 * sq(v(1)) + 35.0 * v(15) - 79.0 * v(16) - 92.0,
            vec![(1, 28.0 * v(1)), (15, 35.0), (16, -79.0)],
        ),
        (
            15.0 * sq(v(2)) + 11.0 * v(15) - 61.0 * v(16) - 54.0,
            vec![(2, 30.0 * v(2)), (15, 11.0), (16, -61.0)],
        ),
        (
            5.0 * sq(v(1)) + 2.0 * v(2) + 9.0 * v(17).powi(4) - v(18) - 68.0,
            vec![(1, 10.0 * v(1)), (2, 2.0), (17, 36.0 * v(17).powi(3)), (18, -1.0)],
        ),
        (
            sq(v(1)) - v(2) + 19.0 * v(19) - 20.0 * v(20) + 19.0,
            vec![(1, 2.0 * v(1)), (2, -1.0), (19, 19.0), (20, -20.0)],
        ),
        (
            7.0 * sq(v(1)) + 5.0 * sq(v(2)) + sq(v(19)) - 30.0 * v(20),
            vec![(1, 14.0 * v(1)), (2, 10.0 * v(2)), (19, 2.0 * v(19)), (20, -30.0)],
        ),
    ];
    for (value, sparse) in terms {
        let mut g = g1.clone();
        for (i, d) in sparse {
            g[i - 1] += 10.0 * d;
        }
        out.push((f1 + 10.0 * value, g));
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace(['-', ' '], "_");
        TestFunction::ALL
            .into_iter()
            .find(|f| f.name() == key)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown test function '{s}'")))
    }
}

impl PiecewiseSmooth for TestFunction {
    fn dimension(&self) -> usize {
        TestFunction::dimension(*self)
    }

    fn value(&self, x: &Vector) -> Result<f64> {
        self.eval(x)
    }

    fn first_active(&self, x: &Vector) -> Result<(f64, Vector)> {
        let pieces = self.pieces(x)?;
        let max = pieces
            .iter()
            .map(|(v, _)| *v)
            .fold(f64::NEG_INFINITY, f64::max);
        let (v, g) = pieces
            .into_iter()
            .find(|(v, _)| *v == max)
            .expect("at least one piece");
        Ok((v, g))
    }
}

pub fn eval_test_function(name: TestFunction, x: &Vector) -> Result<f64> {
    name.eval(x)
}
