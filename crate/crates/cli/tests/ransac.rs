use minfit::synth::{random_cone, random_cylinder, sample_on, trial_rng};
use minfit::{primitive_distance, random_unit, OrientedPoint, Point3, Primitive, SolverKind};
use minfit_cli::ransac::{ransac, RansacConfig, RansacError};
use rand::Rng;

fn outlier<R: Rng>(rng: &mut R) -> OrientedPoint {
    let p = Point3::from_fn(|_, _| rng.random_range(-2.0..2.0));
    OrientedPoint::oriented(p, random_unit(rng)).unwrap()
}

fn config(kind: SolverKind) -> RansacConfig {
    RansacConfig { kind, iterations: 300, tol_pos: 1e-4, tol_normal: 1e-3, min_inliers: 30, seed: 5, max_results: 4 }
}

#[test]
fn cylinder_with_outliers() {
    let mut rng = trial_rng(100, 0);
    let truth: Primitive = random_cylinder(&mut rng).into();
    let mut cloud: Vec<OrientedPoint> = (0..140).map(|_| sample_on(&truth, true, &mut rng)).collect();
    cloud.extend((0..60).map(|_| outlier(&mut rng)));
    let found = ransac(&cloud, &config(SolverKind::Cylinder1N2P)).unwrap();
    let top = &found[0];
    assert!(primitive_distance(&top.primitive, &truth, &cloud[0].p) <= 1e-3, "{top:?}");
    let true_hits = top.inlier_indices.iter().filter(|&&i| i < 140).count();
    assert!(true_hits as f64 >= 0.95 * 140.0, "{true_hits}");
    // Same seed, same answer.
    assert_eq!(found, ransac(&cloud, &config(SolverKind::Cylinder1N2P)).unwrap());
}

#[test]
fn two_cones() {
    let mut rng = trial_rng(101, 0);
    let cones: [Primitive; 2] = [random_cone(&mut rng).into(), random_cone(&mut rng).into()];
    let mut cloud = Vec::new();
    for c in &cones {
        cloud.extend((0..100).map(|_| sample_on(c, true, &mut rng)));
    }
    cloud.extend((0..40).map(|_| outlier(&mut rng)));
    let found = ransac(&cloud, &config(SolverKind::Cone2N)).unwrap();
    assert!(found.len() >= 2);
    for c in &cones {
        assert!(found[..2].iter().any(|d| primitive_distance(&d.primitive, c, &cloud[0].p) <= 1e-3), "{found:?}");
    }
}

#[test]
fn pure_noise_finds_nothing() {
    let mut rng = trial_rng(102, 0);
    let cloud: Vec<OrientedPoint> = (0..200).map(|_| outlier(&mut rng)).collect();
    let found = ransac(&cloud, &config(SolverKind::Cone1N3P)).unwrap();
    assert!(found.is_empty(), "{found:?}");
}

#[test]
fn rejects_bad_input() {
    let cloud = vec![OrientedPoint::plain(Point3::zeros()); 10];
    let err = ransac(&cloud, &config(SolverKind::Cone2N)).unwrap_err();
    assert!(matches!(err, RansacError::TooFewPoints { .. }));
    let mut cfg = config(SolverKind::Cylinder5P);
    cfg.iterations = 0;
    assert_eq!(ransac(&cloud, &cfg), Err(RansacError::NoIterations));
    cfg.iterations = 1;
    cfg.tol_pos = 0.0;
    assert_eq!(ransac(&cloud, &cfg), Err(RansacError::Tolerance));
}
