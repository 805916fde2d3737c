//! JSON problem files.
//!
//! ```text
//! {
//!   "format": "tiltprox-maxquad", "version": 1,
//!   "n": 4, "nf": 2, "nf_xstar": 1, "nf_z": 1, "r": 1.0, "seed": 7, "sparse": false,
//!   "z": [...], "x_star": [...],
//!   "active_at_xstar": [0], "active_at_z": [1],     // zero-based piece indices
//!   "lipschitz_bound": 12.5,
//!   "quadratics": [
//!     { "hessian": { "dense": [[...], ...] }, "b": [...], "c": 0.0 },
//!     { "hessian": { "triplets": [[row, col, value], ...] }, "b": [...], "c": 0.0 }
//!   ]
//! }
//! ```
//!
//! Sparse problems store Hessians as triplets of every entry whose bit pattern
//! is nonzero. Floats are written in shortest round-trip form and parsed with
//! correct rounding, so a read of a written file reproduces the problem bit for bit.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{MaxQuadProblem, Quadratic};
use crate::error::{Error, Result};
use crate::Vector;

pub const FORMAT_TAG: &str = "tiltprox-maxquad";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HessianRepr {
    Dense(Vec<Vec<f64>>),
    Triplets(Vec<(usize, usize, f64)>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticRepr {
    pub hessian: HessianRepr,
    pub b: Vec<f64>,
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub format: String,
    pub version: u32,
    pub n: usize,
    pub nf: usize,
    pub nf_xstar: usize,
    pub nf_z: usize,
    pub r: f64,
    pub seed: u64,
    pub sparse: bool,
    pub z: Vec<f64>,
    pub x_star: Vec<f64>,
    pub active_at_xstar: Vec<usize>,
    pub active_at_z: Vec<usize>,
    pub lipschitz_bound: f64,
    pub quadratics: Vec<QuadraticRepr>,
}

impl From<&MaxQuadProblem> for ProblemFile {
    fn from(p: &MaxQuadProblem) -> Self {
        let quadratics = p
            .quadratics
            .iter()
            .map(|q| {
                let a = q.hessian();
                let hessian = if p.sparse {
                    let mut triplets = Vec::new();
                    for i in 0..a.nrows() {
                        for j in 0..a.ncols() {
                            if a[(i, j)].to_bits() != 0 {
                                triplets.push((i, j, a[(i, j)]));
                            }
                        }
                    }
                    HessianRepr::Triplets(triplets)
                } else {
                    HessianRepr::Dense(
                        (0..a.nrows())
                            .map(|i| a.row(i).iter().copied().collect())
                            .collect(),
                    )
                };
                QuadraticRepr {
                    hessian,
                    b: q.linear().iter().copied().collect(),
                    c: q.constant(),
                }
            })
            .collect();
        ProblemFile {
            format: FORMAT_TAG.to_string(),
            version: FORMAT_VERSION,
            n: p.n,
            nf: p.nf,
            nf_xstar: p.nf_xstar,
            nf_z: p.nf_z,
            r: p.r,
            seed: p.seed,
            sparse: p.sparse,
            z: p.z.iter().copied().collect(),
            x_star: p.x_star.iter().copied().collect(),
            active_at_xstar: p.active_at_xstar.clone(),
            active_at_z: p.active_at_z.clone(),
            lipschitz_bound: p.lipschitz_bound,
            quadratics,
        }
    }
}

impl TryFrom<ProblemFile> for MaxQuadProblem {
    type Error = Error;

    fn try_from(f: ProblemFile) -> Result<Self> {
        if f.format != FORMAT_TAG || f.version != FORMAT_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported problem format '{}' v{}",
                f.format, f.version
            )));
        }
        let n = f.n;
        let vector = |v: Vec<f64>| -> Result<Vector> {
            if v.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: v.len(),
                });
            }
            Ok(Vector::from_vec(v))
        };
        let mut quadratics = Vec::with_capacity(f.quadratics.len());
        for q in f.quadratics {
            let a = match q.hessian {
                HessianRepr::Dense(rows) => {
                    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                        return Err(Error::InvalidParameter("dense Hessian has wrong shape".into()));
                    }
                    DMatrix::from_fn(n, n, |i, j| rows[i][j])
                }
                HessianRepr::Triplets(triplets) => {
                    let mut a = DMatrix::zeros(n, n);
                    for (i, j, v) in triplets {
                        if i >= n || j >= n {
                            return Err(Error::InvalidParameter(format!(
                                "Hessian triplet ({i}, {j}) out of range"
                            )));
                        }
                        a[(i, j)] = v;
                    }
                    a
                }
            };
            quadratics.push(Quadratic::new(a, vector(q.b)?, q.c)?);
        }
        let problem = MaxQuadProblem {
            n,
            nf: f.nf,
            nf_xstar: f.nf_xstar,
            nf_z: f.nf_z,
            quadratics,
            z: vector(f.z)?,
            r: f.r,
            x_star: vector(f.x_star)?,
            active_at_xstar: f.active_at_xstar,
            active_at_z: f.active_at_z,
            lipschitz_bound: f.lipschitz_bound,
            seed: f.seed,
            sparse: f.sparse,
        };
        if problem.quadratics.len() != problem.nf
            || problem.active_at_xstar.iter().chain(&problem.active_at_z).any(|&i| i >= problem.nf)
        {
            return Err(Error::InvalidParameter("inconsistent piece counts".into()));
        }
        Ok(problem)
    }
}

pub fn write_problem(problem: &MaxQuadProblem, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, &ProblemFile::from(problem))?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn read_problem(path: &Path) -> Result<MaxQuadProblem> {
    let file: ProblemFile = serde_json::from_reader(BufReader::new(File::open(path)?))?;
    MaxQuadProblem::try_from(file)
}

impl MaxQuadProblem {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ProblemFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ProblemFile = serde_json::from_str(text)?;
        Self::try_from(file)
    }
}
