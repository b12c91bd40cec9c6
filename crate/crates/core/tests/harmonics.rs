use std::f64::consts::PI;

use catchmesh::sh_basis::{numerical_rank, reference_quadrature};
use catchmesh::*;
use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use proptest::prelude::*;

fn unit_point() -> impl Strategy<Value = SpherePoint> {
    (-1.0f64..=1.0, 0.0f64..2.0 * PI).prop_map(|(z, phi)| SpherePoint::from_polar(z.acos(), phi))
}

fn rotation() -> impl Strategy<Value = Matrix3<f64>> {
    (unit_point(), 0.0f64..2.0 * PI).prop_map(|(axis, angle)| {
        let axis = Unit::new_normalize(Vector3::new(axis.x, axis.y, axis.z));
        *Rotation3::from_axis_angle(&axis, angle).matrix()
    })
}

fn degree_sums(y: &[f64], n: usize) -> Vec<f64> {
    (0..=n).map(|l| y[l * l..(l + 1) * (l + 1)].iter().map(|v| v * v).sum()).collect()
}

proptest! {
    #[test]
    fn addition_theorem(p in unit_point()) {
        let y = eval_basis(&p, 10).unwrap();
        for (l, s) in degree_sums(&y, 10).into_iter().enumerate() {
            prop_assert!((s - (2 * l + 1) as f64 / (4.0 * PI)).abs() <= 1e-10);
        }
    }

    #[test]
    fn degree_sums_are_rotation_invariant(p in unit_point(), r in rotation()) {
        let v = r * Vector3::new(p.x, p.y, p.z);
        let q = SpherePoint::new(v.x, v.y, v.z);
        let a = degree_sums(&eval_basis(&p, 12).unwrap(), 12);
        let b = degree_sums(&eval_basis(&q, 12).unwrap(), 12);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn harmonics_bounded_at_high_degree(p in unit_point()) {
        let n = 60;
        let y = eval_basis(&p, n).unwrap();
        for (k, v) in y.iter().enumerate() {
            let l = BasisIndex::from_linear(k).l;
            prop_assert!(v.is_finite());
            prop_assert!(v.abs() <= ((2 * l + 1) as f64 / (4.0 * PI)).sqrt() * (1.0 + 1e-10));
        }
    }
}

#[test]
fn output_length_matches_dimension() {
    let p = SpherePoint::new(0.3, -0.2, 0.9);
    for n in 0..=20 {
        assert_eq!(eval_basis(&p, n).unwrap().len(), (n + 1) * (n + 1));
        assert_eq!(dimension(n), (n + 1) * (n + 1));
    }
}

#[test]
fn low_degree_examples() {
    let y = eval_basis(&SpherePoint::new(0.2, 0.5, -0.1), 0).unwrap();
    assert!((y[0] - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);

    let y = eval_basis(&SpherePoint::north(), 1).unwrap();
    let at = |l, m| y[BasisIndex::new(l, m).unwrap().linear()];
    assert_eq!(at(1, -1), 0.0);
    assert_eq!(at(1, 1), 0.0);
    assert!((at(1, 0) - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
}

#[test]
fn rejects_non_unit_points() {
    let p = SpherePoint { x: 1.0, y: 0.0, z: 1e-3 };
    assert!(eval_basis(&p, 3).is_err());
}

#[test]
fn gram_identity_with_reference_quadrature() {
    for n in 0..=10 {
        let (nodes, weights) = reference_quadrature(n);
        let config = PointConfiguration::new(nodes, "gl").unwrap();
        let v = vandermonde(&config, n).unwrap().to_matrix();
        let mut scaled = v.clone();
        for (mut row, w) in scaled.row_iter_mut().zip(&weights) {
            row *= *w;
        }
        let gram = v.transpose() * scaled;
        let err = (gram - nalgebra::DMatrix::<f64>::identity(dimension(n), dimension(n))).amax();
        assert!(err <= 1e-8, "n={n}: {err}");
    }
}

#[test]
fn vandermonde_layout_and_rank() {
    let single = PointConfiguration::new(vec![SpherePoint::new(0.0, 0.6, 0.8)], "one").unwrap();
    let v = vandermonde(&single, 0).unwrap();
    assert_eq!((v.rows(), v.cols()), (1, 1));
    assert!((v.get(0, 0) - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);

    let config = zonal_equal_area_points(181).unwrap();
    let v = vandermonde(&config, 4).unwrap();
    assert_eq!((v.rows(), v.cols()), (181, 25));
    assert_eq!(numerical_rank(&v, 1e-10), 25);
    for (i, p) in config.points().iter().enumerate() {
        assert_eq!(v.row(i), eval_basis(p, 4).unwrap().as_slice());
    }
}

#[test]
fn equidistributed_gram_is_nearly_scaled_identity() {
    let config = zonal_equal_area_points(1187).unwrap();
    let v = vandermonde(&config, 10).unwrap().to_matrix();
    let gram = v.transpose() * &v / 1187.0;
    let target = 1.0 / (4.0 * PI);
    let dev = (gram - nalgebra::DMatrix::<f64>::identity(121, 121) * target).amax();
    assert!(dev <= 0.05 * target, "deviation {dev}");
}
