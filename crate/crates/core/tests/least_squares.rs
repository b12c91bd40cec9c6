use catchmesh::tables::projectors;
use catchmesh::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mesh(n: usize) -> PolynomialMesh {
    build_optimal_mesh(n, &MeshCardinalityPolicy::default()).unwrap()
}

fn random_coeffs(n: usize, seed: u64) -> HarmonicCoefficients {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    HarmonicCoefficients::new((0..dimension(n)).map(|_| rng.random_range(-1.0..1.0)).collect(), n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fitting_a_polynomial_reproduces_it(n in 1usize..7, seed in any::<u64>(), weighted in any::<bool>()) {
        let points = zonal_equal_area_points(3 * dimension(n) + 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let weights: Vec<f64> = if weighted {
            (0..points.len()).map(|_| rng.random_range(0.2..3.0)).collect()
        } else {
            vec![1.0; points.len()]
        };
        let c = random_coeffs(n, seed);
        let samples = evaluate_poly(&c, &points).unwrap();
        let fit = weighted_ls_fit(&points, &weights, n, &samples).unwrap();
        let control = zonal_equal_area_points(5000).unwrap();
        let truth = evaluate_poly(&c, &control).unwrap();
        let scale = truth.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = evaluate_poly(&fit, &control).unwrap().iter().zip(&truth).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        prop_assert!(diff <= 1e-9 * scale);
    }

    #[test]
    fn residual_is_orthogonal_to_the_space(n in 1usize..6, seed in any::<u64>()) {
        let points = zonal_equal_area_points(2 * dimension(n) + 11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights: Vec<f64> = (0..points.len()).map(|_| rng.random_range(0.2..3.0)).collect();
        let f: Vec<f64> = (0..points.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let c = weighted_ls_fit(&points, &weights, n, &f).unwrap();
        let v = vandermonde(&points, n).unwrap().to_matrix();
        let r = DVector::from_vec(f.clone()) - &v * DVector::from_vec(c.coeffs.clone());
        let wr = DVector::from_iterator(r.len(), r.iter().zip(&weights).map(|(a, w)| a * w));
        let g = v.transpose() * wr;
        let f_max = f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mass: f64 = weights.iter().sum();
        prop_assert!(g.amax() <= 1e-8 * f_max * mass);
    }
}

#[test]
fn basis_element_and_constant_are_reproduced() {
    let mesh = mesh(4);
    let sub = extract_catch_submesh(&mesh, &CatchOptions::default()).unwrap();
    let k = BasisIndex::new(3, 2).unwrap().linear();
    let y32: Vec<f64> = sub.points.points().iter().map(|p| eval_basis(p, 3).unwrap()[k]).collect();
    let c = weighted_ls_fit(&sub.points, &sub.weights, 4, &y32).unwrap();
    assert!(c.max_abs_diff(&HarmonicCoefficients::unit(4, k)) <= 1e-10);
    let control = control_grid(20_000).unwrap();
    let err = sup_error(&c, |p| eval_basis(p, 3).unwrap()[k], &control).unwrap();
    assert!(err <= 1e-10);

    let c = unweighted_ls_fit(&mesh.config, 4, &vec![0.7; mesh.len()]).unwrap();
    let mut expected = HarmonicCoefficients::zeros(4);
    expected.coeffs[0] = 0.7 * (4.0 * std::f64::consts::PI).sqrt();
    assert!(c.max_abs_diff(&expected) <= 1e-12);

    let c = unweighted_ls_fit(&mesh.config, 4, &vec![0.0; mesh.len()]).unwrap();
    assert!(c.coeffs.iter().all(|&v| v == 0.0));
}

#[test]
fn catch_and_full_mesh_projections_agree_on_polynomials() {
    for n in [3, 5] {
        let mesh = mesh(n);
        let sub = extract_catch_submesh(&mesh, &CatchOptions::default()).unwrap();
        let (full, weighted) = projectors(&mesh, &sub).unwrap();
        let c = random_coeffs(n, n as u64);
        let a = full.fit(&evaluate_poly(&c, &mesh.config).unwrap()).unwrap();
        let b = weighted.fit(&evaluate_poly(&c, &sub.points).unwrap()).unwrap();
        assert!(a.max_abs_diff(&b) <= 1e-8);
        assert!(a.max_abs_diff(&c) <= 1e-8);
    }
}

#[test]
fn operator_norm_sandwich() {
    for n in [2, 5, 8] {
        let mesh = mesh(n);
        let sub = extract_catch_submesh(&mesh, &CatchOptions::default()).unwrap();
        let control = control_grid(default_control_size(n)).unwrap();
        let lambda = ls_operator_norm(&sub.points, &sub.weights, n, &control).unwrap();
        let upper = mesh.mesh_constant * (mesh.len() as f64).sqrt();
        assert!((1.0..=upper).contains(&lambda), "n={n}: {lambda} vs {upper}");
    }
}

#[test]
fn degree_zero_norm_is_one() {
    let points = zonal_equal_area_points(30).unwrap();
    let weights: Vec<f64> = (1..=30).map(|i| i as f64).collect();
    let control = control_grid(1000).unwrap();
    let lambda = ls_operator_norm(&points, &weights, 0, &control).unwrap();
    assert!((lambda - 1.0).abs() < 1e-12);
}

#[test]
fn operator_norm_matches_dense_kernel() {
    let points = zonal_equal_area_points(150).unwrap();
    let weights: Vec<f64> = (0..150).map(|i| 1.0 + (i % 7) as f64 / 3.0).collect();
    let n = 5;
    let control = control_grid(3000).unwrap();
    // Kernel through the weighted Gram matrix: K(x, t) = v(x)ᵀ G⁻¹ v(t).
    let v = vandermonde(&points, n).unwrap().to_matrix();
    let w = DMatrix::from_diagonal(&DVector::from_vec(weights.clone()));
    let gram_inv = (v.transpose() * &w * &v).try_inverse().unwrap();
    let vc = vandermonde(&control, n).unwrap().to_matrix();
    let k = vc * gram_inv * v.transpose() * w;
    let expected = k.row_iter().map(|row| row.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let lambda = ls_operator_norm(&points, &weights, n, &control).unwrap();
    assert!((lambda - expected).abs() <= 1e-9 * expected);
}

#[test]
fn smooth_errors_decrease_and_catch_tracks_full_mesh() {
    let f = TestFunction::Exponential;
    let mut full_errors = Vec::new();
    let mut catch_errors = Vec::new();
    for n in [2, 5, 8, 11, 14] {
        let mesh = mesh(n);
        let sub = extract_catch_submesh(&mesh, &CatchOptions::default()).unwrap();
        let (full, weighted) = projectors(&mesh, &sub).unwrap();
        let control = control_grid(default_control_size(n)).unwrap();
        let e_full = sup_error(&full.fit(&f.sample(&mesh.config)).unwrap(), |p| f.eval(p), &control).unwrap();
        let e_catch = sup_error(&weighted.fit(&f.sample(&sub.points)).unwrap(), |p| f.eval(p), &control).unwrap();
        assert!(e_catch <= 20.0 * e_full, "n={n}: {e_catch} vs {e_full}");
        full_errors.push(e_full);
        catch_errors.push(e_catch);
    }
    assert!(full_errors.windows(2).all(|w| w[1] < w[0]), "{full_errors:?}");
    assert!(catch_errors.windows(2).all(|w| w[1] < w[0]), "{catch_errors:?}");
}

#[test]
fn rank_deficiency_is_an_error() {
    let points = zonal_equal_area_points(10).unwrap();
    assert!(matches!(unweighted_ls_fit(&points, 3, &[0.0; 10]), Err(Error::RankDeficient { .. })));
    let equator: Vec<SpherePoint> =
        (0..40).map(|k| SpherePoint::from_polar(std::f64::consts::FRAC_PI_2, k as f64 * 0.157)).collect();
    let ring = PointConfiguration::new(equator, "ring").unwrap();
    assert!(matches!(unweighted_ls_fit(&ring, 2, &[0.0; 40]), Err(Error::RankDeficient { .. })));
}

#[test]
fn test_function_values() {
    assert!((test_function(2, &SpherePoint::new(1.0, 0.0, 0.0)).unwrap() - 0.2718281828459045).abs() < 1e-15);
    assert_eq!(test_function(1, &SpherePoint::north()).unwrap(), 1.0);
    let d = SpherePoint::new(1.0, 1.0, 1.0);
    assert!((test_function(3, &d).unwrap() - 0.17320508075688773).abs() < 1e-15);
    assert!(matches!(test_function(0, &d), Err(Error::UnknownFunction(0))));
}

#[test]
fn evaluation_examples() {
    let control = control_grid(500).unwrap();
    assert!(evaluate_poly(&HarmonicCoefficients::zeros(3), &control).unwrap().iter().all(|&v| v == 0.0));
    let e0 = HarmonicCoefficients::unit(2, 0);
    let c = 1.0 / (4.0 * std::f64::consts::PI).sqrt();
    assert!(evaluate_poly(&e0, &control).unwrap().iter().all(|&v| (v - c).abs() < 1e-15));
}
