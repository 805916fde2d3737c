mod common;

use proptest::prelude::*;
use tiltprox::model::{Bundle, BundleElement};
use tiltprox::prox_qp::{dist_to_hull, project_simplex, prox_of_model, DualQp};
use tiltprox::Vector;

fn planes(n: usize, m: usize) -> impl Strategy<Value = Vec<BundleElement>> {
    prop::collection::vec(
        (
            prop::collection::vec(-3.0..3.0f64, n),
            -5.0..5.0f64,
            prop::collection::vec(-4.0..4.0f64, n),
        ),
        m,
    )
    .prop_map(|raw| {
        raw.into_iter()
            .enumerate()
            .map(|(i, (site, value, slope))| {
                BundleElement::new(i as i64 + 1, Vector::from_vec(site), value, Vector::from_vec(slope))
            })
            .collect()
    })
}

fn case() -> impl Strategy<Value = (Vec<BundleElement>, Vector, f64)> {
    (1usize..=3, 1usize..=4).prop_flat_map(|(n, m)| {
        (
            planes(n, m),
            prop::collection::vec(-2.0..2.0f64, n).prop_map(Vector::from_vec),
            0.2..5.0f64,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn prox_matches_face_enumeration((elements, z, r) in case()) {
        let bundle = Bundle::from_elements(z.clone(), r, elements.clone()).unwrap();
        let sol = prox_of_model(&bundle, 1e-14, None).unwrap();
        let brute = common::brute_force_prox(&elements, &z, r);
        prop_assert!((&sol.x_next - &brute).norm() <= 1e-7 * (1.0 + brute.norm()),
            "qp {} vs brute {}", sol.x_next, brute);
        let total: f64 = sol.lambda.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(sol.lambda.iter().all(|&l| l >= 0.0));
    }

    #[test]
    fn warm_start_reaches_same_point((elements, z, r) in case(), seed in 0u64..1000) {
        let bundle = Bundle::from_elements(z, r, elements).unwrap();
        let cold = prox_of_model(&bundle, 1e-14, None).unwrap();
        let m = bundle.len();
        let mut warm: Vec<f64> = (0..m).map(|i| ((seed as usize + 7 * i) % 5) as f64 + 0.1).collect();
        let s: f64 = warm.iter().sum();
        warm.iter_mut().for_each(|w| *w /= s);
        let hot = prox_of_model(&bundle, 1e-14, Some(&warm)).unwrap();
        prop_assert!((&cold.x_next - &hot.x_next).norm() <= 1e-7 * (1.0 + cold.x_next.norm()));
    }

    #[test]
    fn simplex_projection_is_a_projection(v in prop::collection::vec(-10.0..10.0f64, 1..12)) {
        let p = project_simplex(&v);
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // variational inequality against every vertex
        for k in 0..v.len() {
            let dot: f64 = (0..v.len())
                .map(|i| (v[i] - p[i]) * (if i == k { 1.0 } else { 0.0 } - p[i]))
                .sum();
            prop_assert!(dot <= 1e-10, "vertex {k}: {dot}");
        }
    }

    #[test]
    fn hull_distance_of_member_is_zero(
        pts in prop::collection::vec(prop::collection::vec(-5.0..5.0f64, 3), 1..5),
        w in prop::collection::vec(0.01..1.0f64, 5),
    ) {
        let points: Vec<Vector> = pts.into_iter().map(Vector::from_vec).collect();
        let total: f64 = w[..points.len()].iter().sum();
        let inside = points
            .iter()
            .zip(&w)
            .fold(Vector::zeros(3), |acc, (p, &wi)| acc + p * (wi / total));
        prop_assert!(dist_to_hull(&inside, &points) < 1e-7);
    }
}

#[test]
fn hull_distance_to_segment() {
    let pts = [Vector::from_vec(vec![-1.0, 0.0]), Vector::from_vec(vec![1.0, 0.0])];
    let d = dist_to_hull(&Vector::from_vec(vec![0.3, 2.0]), &pts);
    assert!((d - 2.0).abs() < 1e-9);
    let d = dist_to_hull(&Vector::from_vec(vec![4.0, 4.0]), &pts);
    assert!((d - 5.0).abs() < 1e-9);
}

#[test]
fn duality_gap_vanishes_at_optimum() {
    let g = nalgebra::DMatrix::from_row_slice(2, 3, &[1.0, -1.0, 0.0, 0.0, 0.0, 2.0]);
    let e = nalgebra::DVector::from_vec(vec![0.5, 0.2, -0.1]);
    let qp = DualQp::new(g, e, 1.5).unwrap();
    let sol = qp.solve(1e-13, None).unwrap();
    assert!(qp.duality_gap(&sol.lambda) <= 1e-12);
    let vertex = [1.0, 0.0, 0.0];
    assert!(qp.objective(&vertex) >= qp.objective(&sol.lambda) - 1e-15);
}
