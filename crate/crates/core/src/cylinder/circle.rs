use serde::{Deserialize, Serialize};

use crate::error::{FitError, Result};
use crate::geom::{Dir3, Point3};

/// A circle in space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle3D {
    pub center: Point3,
    pub radius: f64,
    pub plane_normal: Dir3,
}

/// The circle through three non-collinear points.
pub fn circumcircle(q1: &Point3, q2: &Point3, q3: &Point3) -> Result<Circle3D> {
    let a = q1 - q3;
    let b = q2 - q3;
    let axb = a.cross(&b);
    let den = axb.norm_squared();
    if den <= (1e-12 * a.norm() * b.norm()).powi(2) || den == 0.0 {
        return Err(FitError::FlatCircle);
    }
    let center = q3 + (b * a.norm_squared() - a * b.norm_squared()).cross(&axb) / (2.0 * den);
    let radius = (center - q1).norm();
    Ok(Circle3D { center, radius, plane_normal: Dir3::new(axb)?.sign_normalized() })
}

/// Twice the area of the triangle `(a, b, c)`.
pub(crate) fn area2(a: &Point3, b: &Point3, c: &Point3) -> f64 {
    (b - a).cross(&(c - a)).norm()
}

/// Indices of the triple spanning the largest triangle.
pub(crate) fn best_triple(pts: &[Point3]) -> (usize, usize, usize) {
    let mut best = (0, 1, 2);
    let mut best_area = -1.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for k in j + 1..pts.len() {
                let s = area2(&pts[i], &pts[j], &pts[k]);
                if s > best_area {
                    best_area = s;
                    best = (i, j, k);
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unit_circle() {
        let c = circumcircle(&Point3::x(), &Point3::y(), &-Point3::x()).unwrap();
        assert!(c.center.norm() < 1e-15);
        assert!((c.radius - 1.0).abs() < 1e-15);
        assert!((c.plane_normal.z() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn collinear_is_flat() {
        let r = circumcircle(&Point3::zeros(), &Point3::x(), &(Point3::x() * 2.0));
        assert_eq!(r, Err(FitError::FlatCircle));
    }

    #[test]
    fn random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..100 {
            let q: Vec<Point3> = (0..3).map(|_| Point3::from_fn(|_, _| rng.random_range(-1.0..1.0))).collect();
            let c = circumcircle(&q[0], &q[1], &q[2]).unwrap();
            for p in &q {
                assert!(((p - c.center).norm() - c.radius).abs() <= 1e-12 * (1.0 + c.radius));
                assert!((p - c.center).dot(c.plane_normal.as_vec()).abs() < 1e-12 * (1.0 + c.radius));
            }
        }
    }
}
