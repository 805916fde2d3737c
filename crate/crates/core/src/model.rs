//! Bundle storage, the piecewise-linear model, tilt correction, and bundle selection.
//!
//! A bundle element is a linearization `value + subgradᵀ(x − site)`. The model is
//! the pointwise max over the bundle. Index `-1` holds the aggregate plane, index `0`
//! the plane at the prox-centre, and `k ≥ 1` the plane at iterate `x_k`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::Vector;

pub const AGGREGATE_INDEX: i64 = -1;
pub const CENTRE_INDEX: i64 = 0;

/// Slack used by the almost-active selection rule.
pub const NEAR_ACTIVE_SLACK: f64 = 1e-6;

pub type IndexSet = BTreeSet<i64>;

#[derive(Clone, Debug, PartialEq)]
pub struct BundleElement {
    pub index: i64,
    pub site: Vector,
    pub value: f64,
    pub subgrad: Vector,
}

impl BundleElement {
    pub fn new(index: i64, site: Vector, value: f64, subgrad: Vector) -> Self {
        Self {
            index,
            site,
            value,
            subgrad,
        }
    }

    /// Value of this element's plane at `x`.
    pub fn plane_at(&self, x: &Vector) -> f64 {
        plane_value(self.value, &self.subgrad, &self.site, x)
    }

    pub fn is_aggregate(&self) -> bool {
        self.index == AGGREGATE_INDEX
    }
}

/// `value + subgradᵀ(x − site)`, accumulated in a fixed order so that the
/// tilt test and the model evaluation agree bit for bit.
pub(crate) fn plane_value(value: f64, subgrad: &Vector, site: &Vector, x: &Vector) -> f64 {
    let mut acc = 0.0;
    for i in 0..x.len() {
        acc += subgrad[i] * (x[i] - site[i]);
    }
    value + acc
}

#[derive(Clone, Debug)]
pub struct Bundle {
    elements: Vec<BundleElement>,
    prox_centre: Vector,
    prox_param: f64,
}

impl Bundle {
    /// A bundle holding only the prox-centre element.
    pub fn new(prox_centre: Vector, prox_param: f64, centre_element: BundleElement) -> Result<Self> {
        if !(prox_param > 0.0) || !prox_param.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "prox parameter must be positive, got {prox_param}"
            )));
        }
        ensure_finite(prox_centre.as_slice(), "prox centre")?;
        if centre_element.index != CENTRE_INDEX {
            return Err(Error::InvalidParameter(
                "first bundle element must have index 0".into(),
            ));
        }
        if centre_element.site != prox_centre {
            return Err(Error::InvalidParameter(
                "index-0 element must sit at the prox centre".into(),
            ));
        }
        let mut bundle = Self {
            elements: Vec::new(),
            prox_centre,
            prox_param,
        };
        bundle.insert(centre_element)?;
        Ok(bundle)
    }

    /// Builds a bundle from arbitrary elements (no index-0 requirement).
    /// Used by tests and by callers that assemble their own models.
    pub fn from_elements(
        prox_centre: Vector,
        prox_param: f64,
        elements: Vec<BundleElement>,
    ) -> Result<Self> {
        if !(prox_param > 0.0) || !prox_param.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "prox parameter must be positive, got {prox_param}"
            )));
        }
        ensure_finite(prox_centre.as_slice(), "prox centre")?;
        let mut bundle = Self {
            elements: Vec::with_capacity(elements.len()),
            prox_centre,
            prox_param,
        };
        for e in elements {
            bundle.insert(e)?;
        }
        Ok(bundle)
    }

    /// Inserts an element, replacing any element with the same index.
    pub fn insert(&mut self, element: BundleElement) -> Result<()> {
        let n = self.prox_centre.len();
        for v in [&element.site, &element.subgrad] {
            if v.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: v.len(),
                });
            }
        }
        ensure_finite(element.site.as_slice(), "bundle site")?;
        ensure_finite(element.subgrad.as_slice(), "bundle subgradient")?;
        ensure_finite(&[element.value], "bundle value")?;
        match self.elements.iter().position(|e| e.index == element.index) {
            Some(pos) => self.elements[pos] = element,
            None => {
                let pos = self
                    .elements
                    .iter()
                    .position(|e| e.index > element.index)
                    .unwrap_or(self.elements.len());
                self.elements.insert(pos, element);
            }
        }
        Ok(())
    }

    /// Drops every element whose index is not in `keep`.
    pub fn retain(&mut self, keep: &IndexSet) {
        self.elements.retain(|e| keep.contains(&e.index));
    }

    /// Elements in increasing index order.
    pub fn elements(&self) -> &[BundleElement] {
        &self.elements
    }

    pub fn get(&self, index: i64) -> Option<&BundleElement> {
        self.elements.iter().find(|e| e.index == index)
    }

    pub fn indices(&self) -> IndexSet {
        self.elements.iter().map(|e| e.index).collect()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn prox_centre(&self) -> &Vector {
        &self.prox_centre
    }

    pub fn prox_param(&self) -> f64 {
        self.prox_param
    }

    pub fn dimension(&self) -> usize {
        self.prox_centre.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelEvaluation {
    pub value: f64,
    /// Indices whose plane equals the max exactly.
    pub argmax_indices: IndexSet,
    /// Indices whose plane is within [`NEAR_ACTIVE_SLACK`] of the max.
    pub near_active_indices: IndexSet,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TiltReport {
    pub excess: f64,
    pub corrected: bool,
    pub correction_norm: f64,
}

/// Repairs an approximate subgradient so its plane does not pass above `(z, f(z))`.
///
/// With `E = f_k + g̃ᵀ(z − x_k) − f(z)`, a positive `E` is removed by projecting
/// `g̃` onto the hyperplane `{g : f_k + gᵀ(z − x_k) = f(z)}`, i.e.
/// `g = g̃ − E (z − x_k)/‖z − x_k‖²`. Otherwise `g̃` is returned unchanged.
pub fn tilt_correct(
    z: &Vector,
    f_z: f64,
    x_k: &Vector,
    f_k: f64,
    g_tilde: &Vector,
) -> Result<(Vector, TiltReport)> {
    let n = z.len();
    for v in [x_k, g_tilde] {
        if v.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: v.len(),
            });
        }
    }
    ensure_finite(z.as_slice(), "prox centre")?;
    ensure_finite(x_k.as_slice(), "iterate")?;
    ensure_finite(g_tilde.as_slice(), "approximate subgradient")?;
    ensure_finite(&[f_z, f_k], "function value")?;

    let step = z - x_k;
    let step_sq = step.norm_squared();
    if step_sq == 0.0 {
        if f_k != f_z {
            return Err(Error::OracleInconsistency(format!(
                "f(x_k) = {f_k} but f(z) = {f_z} at the same point"
            )));
        }
        let report = TiltReport {
            excess: 0.0,
            corrected: false,
            correction_norm: 0.0,
        };
        return Ok((g_tilde.clone(), report));
    }

    let excess = plane_value(f_k, g_tilde, x_k, z) - f_z;
    if excess > 0.0 {
        let g = g_tilde - &step * (excess / step_sq);
        let report = TiltReport {
            excess,
            corrected: true,
            correction_norm: excess / step_sq.sqrt(),
        };
        Ok((g, report))
    } else {
        let report = TiltReport {
            excess,
            corrected: false,
            correction_norm: 0.0,
        };
        Ok((g_tilde.clone(), report))
    }
}

pub fn eval_model(bundle: &Bundle, x: &Vector) -> Result<ModelEvaluation> {
    if bundle.is_empty() {
        return Err(Error::EmptyBundle);
    }
    if x.len() != bundle.dimension() {
        return Err(Error::Dimension {
            expected: bundle.dimension(),
            got: x.len(),
        });
    }
    ensure_finite(x.as_slice(), "model evaluation point")?;

    let planes: Vec<(i64, f64)> = bundle
        .elements()
        .iter()
        .map(|e| (e.index, e.plane_at(x)))
        .collect();
    let value = planes
        .iter()
        .map(|&(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let argmax_indices = planes
        .iter()
        .filter(|&&(_, v)| v == value)
        .map(|&(i, _)| i)
        .collect();
    let near_active_indices = planes
        .iter()
        .filter(|&&(_, v)| v + NEAR_ACTIVE_SLACK > value)
        .map(|&(i, _)| i)
        .collect();
    Ok(ModelEvaluation {
        value,
        argmax_indices,
        near_active_indices,
    })
}

/// The aggregate element for the next bundle: site `x_next`, value `φ(x_next)`,
/// subgradient `r(z − x_next)`.
pub fn make_aggregate(bundle: &Bundle, x_next: &Vector) -> Result<BundleElement> {
    let value = eval_model(bundle, x_next)?.value;
    let subgrad = (bundle.prox_centre() - x_next) * bundle.prox_param();
    Ok(BundleElement::new(
        AGGREGATE_INDEX,
        x_next.clone(),
        value,
        subgrad,
    ))
}

/// The same aggregate built from the subproblem's dual weights: slope `Gλ`
/// and value `λᵀe − ‖Gλ‖²/r`, where `e_i` is plane `i` at the centre.
///
/// At an exact subproblem solution this equals [`make_aggregate`]. Under
/// rounding it stays a convex combination of the planes, so its value at the
/// centre is `λᵀe` and never exceeds the model there.
pub fn aggregate_from_weights(bundle: &Bundle, lambda: &[f64], x_next: &Vector) -> Result<BundleElement> {
    if lambda.len() != bundle.len() {
        return Err(Error::Dimension {
            expected: bundle.len(),
            got: lambda.len(),
        });
    }
    let z = bundle.prox_centre();
    let mut slope = Vector::zeros(z.len());
    let mut at_centre = 0.0;
    for (el, &l) in bundle.elements().iter().zip(lambda) {
        slope.axpy(l, &el.subgrad, 1.0);
        at_centre += l * el.plane_at(z);
    }
    let value = at_centre + slope.dot(&(x_next - z));
    Ok(BundleElement::new(AGGREGATE_INDEX, x_next.clone(), value, slope))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BundleVariant {
    /// `{-1, 0, k}`.
    Three,
    /// `{-1, 0, 1, …, k}`.
    Full,
    /// `{-1, 0, k}` plus planes exactly active at the new iterate.
    Active,
    /// `{-1, 0, k}` plus planes within `1e-6` of active at the new iterate.
    AlmostActive,
}

impl BundleVariant {
    pub const ALL: [BundleVariant; 4] = [
        BundleVariant::Three,
        BundleVariant::Full,
        BundleVariant::Active,
        BundleVariant::AlmostActive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BundleVariant::Three => "three",
            BundleVariant::Full => "full",
            BundleVariant::Active => "active",
            BundleVariant::AlmostActive => "almost_active",
        }
    }
}

impl fmt::Display for BundleVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BundleVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "three" | "3" => Ok(BundleVariant::Three),
            "full" | "k+2" => Ok(BundleVariant::Full),
            "active" => Ok(BundleVariant::Active),
            "almost_active" | "almost" => Ok(BundleVariant::AlmostActive),
            other => Err(Error::InvalidParameter(format!(
                "unknown bundle variant '{other}'"
            ))),
        }
    }
}

/// Index set for the bundle whose newest element is `k`.
///
/// `eval_at_next` is the current model evaluated at the new iterate; the
/// activity rules read its argmax and near-active sets.
pub fn select_bundle(
    variant: BundleVariant,
    bundle: &Bundle,
    eval_at_next: &ModelEvaluation,
    k: i64,
) -> IndexSet {
    let mut set: IndexSet = [AGGREGATE_INDEX, CENTRE_INDEX, k].into_iter().collect();
    match variant {
        BundleVariant::Three => {}
        BundleVariant::Full => {
            set.extend(1..=k);
        }
        BundleVariant::Active => {
            set.extend(
                eval_at_next
                    .argmax_indices
                    .iter()
                    .copied()
                    .filter(|i| bundle.get(*i).is_some()),
            );
        }
        BundleVariant::AlmostActive => {
            set.extend(
                eval_at_next
                    .near_active_indices
                    .iter()
                    .copied()
                    .filter(|i| bundle.get(*i).is_some()),
            );
        }
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    fn el(index: i64, site: &[f64], value: f64, g: &[f64]) -> BundleElement {
        BundleElement::new(index, v(site), value, v(g))
    }

    #[test]
    fn tilt_correct_removes_excess() {
        let (g, rep) = tilt_correct(&v(&[0.0]), 0.0, &v(&[1.0]), 0.0, &v(&[-1.0])).unwrap();
        assert_eq!(rep.excess, 1.0);
        assert!(rep.corrected);
        assert_eq!(g[0], 0.0);
        // corrected plane passes through (z, f(z))
        assert_eq!(plane_value(0.0, &g, &v(&[1.0]), &v(&[0.0])), 0.0);
        assert_eq!(rep.correction_norm, 1.0);
    }

    #[test]
    fn tilt_correct_leaves_valid_planes() {
        let (g, rep) = tilt_correct(&v(&[0.0]), 0.0, &v(&[1.0]), 1.0, &v(&[3.0])).unwrap();
        assert_eq!(rep.excess, -2.0);
        assert!(!rep.corrected);
        assert_eq!(rep.correction_norm, 0.0);
        assert_eq!(g[0], 3.0);
    }

    #[test]
    fn tilt_correct_at_centre_is_identity() {
        let z = v(&[0.3, -1.2]);
        let (g, rep) = tilt_correct(&z, 2.5, &z, 2.5, &v(&[4.0, 1.0])).unwrap();
        assert_eq!(rep.excess, 0.0);
        assert!(!rep.corrected);
        assert_eq!(g, v(&[4.0, 1.0]));
    }

    #[test]
    fn tilt_correct_rejects_inconsistent_oracle() {
        let z = v(&[1.0]);
        assert!(matches!(
            tilt_correct(&z, 1.0, &z, 2.0, &v(&[0.0])),
            Err(Error::OracleInconsistency(_))
        ));
        assert!(matches!(
            tilt_correct(&z, f64::NAN, &v(&[0.0]), 2.0, &v(&[0.0])),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn single_plane_model_at_its_site() {
        let z = v(&[1.0, 2.0]);
        let b = Bundle::new(z.clone(), 1.0, el(0, &[1.0, 2.0], 5.0, &[3.0, -1.0])).unwrap();
        let ev = eval_model(&b, &z).unwrap();
        assert_eq!(ev.value, 5.0);
        assert_eq!(ev.argmax_indices, [0].into_iter().collect());
    }

    #[test]
    fn model_ties_report_all_indices() {
        let b = Bundle::from_elements(
            v(&[0.0]),
            1.0,
            vec![el(0, &[0.0], 0.0, &[-1.0]), el(2, &[2.0], 0.0, &[1.0])],
        )
        .unwrap();
        let ev = eval_model(&b, &v(&[1.0])).unwrap();
        assert_eq!(ev.value, -1.0);
        assert_eq!(ev.argmax_indices, [0, 2].into_iter().collect());
        assert!(ev.argmax_indices.is_subset(&ev.near_active_indices));
    }

    #[test]
    fn near_active_uses_slack() {
        let b = Bundle::from_elements(
            v(&[0.0]),
            1.0,
            vec![
                el(0, &[0.0], 1.0, &[0.0]),
                el(1, &[0.0], 1.0 - 5e-7, &[0.0]),
                el(2, &[0.0], 1.0 - 2e-6, &[0.0]),
            ],
        )
        .unwrap();
        let ev = eval_model(&b, &v(&[0.0])).unwrap();
        assert_eq!(ev.argmax_indices, [0].into_iter().collect());
        assert_eq!(ev.near_active_indices, [0, 1].into_iter().collect());
    }

    #[test]
    fn aggregate_formula() {
        let z = v(&[1.0, 0.0]);
        let b = Bundle::new(z.clone(), 2.0, el(0, &[1.0, 0.0], 3.0, &[0.0, 0.0])).unwrap();
        let agg = make_aggregate(&b, &v(&[0.0, 0.0])).unwrap();
        assert_eq!(agg.index, -1);
        assert_eq!(agg.site, v(&[0.0, 0.0]));
        assert_eq!(agg.value, 3.0);
        assert_eq!(agg.subgrad, v(&[2.0, 0.0]));
    }

    #[test]
    fn aggregate_at_centre_is_flat() {
        let z = v(&[0.0]);
        let b = Bundle::new(z.clone(), 1.0, el(0, &[0.0], 1.5, &[0.0])).unwrap();
        let agg = make_aggregate(&b, &z).unwrap();
        assert_eq!(agg.subgrad, v(&[0.0]));
        assert_eq!(agg.value, 1.5);
    }

    #[test]
    fn insert_replaces_same_index() {
        let z = v(&[0.0]);
        let mut b = Bundle::new(z.clone(), 1.0, el(0, &[0.0], 0.0, &[1.0])).unwrap();
        b.insert(el(-1, &[1.0], 2.0, &[0.0])).unwrap();
        b.insert(el(-1, &[2.0], 3.0, &[0.0])).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b.get(-1).unwrap().value, 3.0);
        assert_eq!(b.elements()[0].index, -1);
    }

    #[test]
    fn bundle_rejects_bad_parameters() {
        let z = v(&[0.0]);
        assert!(Bundle::new(z.clone(), 0.0, el(0, &[0.0], 0.0, &[1.0])).is_err());
        assert!(Bundle::new(z.clone(), 1.0, el(3, &[0.0], 0.0, &[1.0])).is_err());
        assert!(Bundle::new(z, 1.0, el(0, &[1.0], 0.0, &[1.0])).is_err());
    }

    fn bundle_with(indices: &[i64]) -> Bundle {
        let elements = indices
            .iter()
            .map(|&i| el(i, &[0.0], i as f64, &[0.0]))
            .collect();
        Bundle::from_elements(v(&[0.0]), 1.0, elements).unwrap()
    }

    fn eval_with(argmax: &[i64], near: &[i64]) -> ModelEvaluation {
        ModelEvaluation {
            value: 0.0,
            argmax_indices: argmax.iter().copied().collect(),
            near_active_indices: near.iter().copied().collect(),
        }
    }

    #[test]
    fn select_three() {
        let b = bundle_with(&[-1, 0, 1, 2, 3, 4]);
        let s = select_bundle(BundleVariant::Three, &b, &eval_with(&[2], &[2, 3]), 5);
        assert_eq!(s, [-1, 0, 5].into_iter().collect());
    }

    #[test]
    fn select_full() {
        let b = bundle_with(&[-1, 0, 1, 2]);
        let s = select_bundle(BundleVariant::Full, &b, &eval_with(&[1], &[1]), 3);
        assert_eq!(s, [-1, 0, 1, 2, 3].into_iter().collect());
    }

    #[test]
    fn select_active_and_almost_active() {
        let b = bundle_with(&[-1, 0, 1, 2, 3]);
        let ev = eval_with(&[2], &[1, 2]);
        let s = select_bundle(BundleVariant::Active, &b, &ev, 4);
        assert_eq!(s, [-1, 0, 2, 4].into_iter().collect());
        let s = select_bundle(BundleVariant::AlmostActive, &b, &ev, 4);
        assert_eq!(s, [-1, 0, 1, 2, 4].into_iter().collect());
    }

    #[test]
    fn variant_names_round_trip() {
        for v in BundleVariant::ALL {
            assert_eq!(v.as_str().parse::<BundleVariant>().unwrap(), v);
        }
        assert!("bogus".parse::<BundleVariant>().is_err());
    }
}
