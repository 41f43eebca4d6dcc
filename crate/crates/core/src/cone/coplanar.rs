use nalgebra::{Vector2, Vector3};

use super::{accept, push_unique};
use crate::conic::{all_collinear, has_collinear_triple, plane_frame, six_point_conic_defect, Conic, ConicShape};
use crate::error::{FitError, Result};
use crate::geom::{Cone, OrientedPoint, Point3, Reason, Similarity, SolutionSet};
use crate::poly::{real_roots, UniPoly};
use crate::tol;

/// Six coplanar points: a cone contains them exactly when a conic does,
/// and then in infinitely many ways.
pub(crate) fn six_coplanar(q: &[Point3]) -> SolutionSet<Cone> {
    let (motion, _) = plane_frame(q);
    let flat: Vec<Vector2<f64>> = q.iter().map(|p| motion.apply(p).xy()).collect();
    if all_collinear(&flat) {
        return SolutionSet::infinite(Reason::CollinearPoints, "all points on one line");
    }
    let six: [Vector2<f64>; 6] = std::array::from_fn(|i| flat[i]);
    if six_point_conic_defect(&six) <= 1e-9 {
        SolutionSet::infinite(Reason::CoplanarConic, "six coplanar points on a conic")
    } else {
        SolutionSet::empty(Reason::CoplanarConic, "six coplanar points not on a conic")
    }
}

/// Frame of the plane conic: origin, two in-plane unit axes and the plane
/// normal, all in the plane coordinates (`z = 0` is the plane).
struct ConicFrame {
    origin: Vector3<f64>,
    e1: Vector3<f64>,
    e2: Vector3<f64>,
}

impl ConicFrame {
    fn new(origin: Vector2<f64>, e1: Vector2<f64>) -> Self {
        ConicFrame {
            origin: Vector3::new(origin.x, origin.y, 0.0),
            e1: Vector3::new(e1.x, e1.y, 0.0),
            e2: Vector3::new(-e1.y, e1.x, 0.0),
        }
    }

    fn local(&self, p: &Point3) -> Vector3<f64> {
        let d = p - self.origin;
        Vector3::new(d.dot(&self.e1), d.dot(&self.e2), d.z)
    }

    fn point(&self, x: f64, y: f64, z: f64) -> Point3 {
        self.origin + self.e1 * x + self.e2 * y + Vector3::z() * z
    }

    fn dir(&self, x: f64, y: f64, z: f64) -> Vector3<f64> {
        self.e1 * x + self.e2 * y + Vector3::z() * z
    }
}

/// Central conic `k1 x^2 + k2 y^2 = 1`: cones whose axis tilts in the
/// `x z` plane. Requires `s = k1 / k2 <= 1`.
fn central_branch(k1: f64, k2: f64, p6: &Vector3<f64>) -> Vec<(Vector3<f64>, Vector3<f64>)> {
    let s = k1 / k2;
    if s > 1.0 + 1e-12 {
        return Vec::new();
    }
    let tau = (1.0 - s).max(0.0).sqrt();
    let lam = 1.0 / k2;
    let (u0, z0) = (p6.x, p6.z);
    // E(n) = |p6|^2 - (tau u0 + n z0)^2, G(n) = 1 - n^2 / s.
    let e = UniPoly::new(vec![p6.norm_squared() - tau * tau * u0 * u0, -2.0 * tau * u0 * z0, -z0 * z0]);
    let g = UniPoly::new(vec![1.0, 0.0, -1.0 / s]);
    let em = e.add(&UniPoly::constant(-lam));
    let quartic = em.mul(&em).add(&g.scale(4.0 * z0 * z0 * lam));
    let Ok(roots) = real_roots(&quartic) else { return Vec::new() };
    let mut out = Vec::new();
    for n in roots {
        let gv = g.eval(n);
        if gv.abs() <= tol::ZERO || z0.abs() <= tol::ZERO {
            continue;
        }
        let c = em.eval(n) / (2.0 * z0 * gv);
        let b = tau * n * c / s;
        out.push((Vector3::new(b, 0.0, c), Vector3::new(tau, 0.0, n)));
    }
    out
}

/// Parabola `x^2 = alpha y`: `t = (0, 1, n)`, `2 c n = -alpha`.
fn parabola_branch(alpha: f64, p6: &Vector3<f64>) -> Vec<(Vector3<f64>, Vector3<f64>)> {
    let (x0, y0, z0) = (p6.x, p6.y, p6.z);
    let cubic = UniPoly::new(vec![
        alpha * z0,
        2.0 * x0 * x0 + 2.0 * z0 * z0 - 2.0 * alpha * y0,
        -alpha * z0 - 4.0 * y0 * z0,
        -2.0 * z0 * z0,
    ]);
    let Ok(roots) = real_roots(&cubic) else { return Vec::new() };
    roots
        .into_iter()
        .filter(|n| n.abs() > tol::ZERO)
        .map(|n| {
            let c = -alpha / (2.0 * n);
            let b = -c * c * (1.0 - n * n) / alpha;
            (Vector3::new(0.0, b, c), Vector3::new(0.0, 1.0, n))
        })
        .collect()
}

/// Cones through five coplanar points and a sixth point off their plane.
pub fn cones_coplanar5(coplanar5: &[Point3; 5], p6: &Point3) -> Result<SolutionSet<Cone>> {
    let all: Vec<Point3> = coplanar5.iter().chain(std::iter::once(p6)).copied().collect();
    let unit = Similarity::unit_box(&all).map_err(|_| FitError::CoincidentPoints)?;
    let q: Vec<Point3> = all.iter().map(|p| unit.apply(p)).collect();
    for i in 0..6 {
        for j in i + 1..6 {
            if (q[i] - q[j]).norm() <= tol::COINCIDENT {
                return Err(FitError::CoincidentPoints);
            }
        }
    }
    let (motion, _) = plane_frame(&q[..5]);
    let to_plane = unit.then(&motion.into());
    let local: Vec<Point3> = q.iter().map(|p| motion.apply(p)).collect();
    if local[5].z.abs() <= tol::COPLANAR {
        return Ok(six_coplanar(&q));
    }
    let flat: [Vector2<f64>; 5] = std::array::from_fn(|i| local[i].xy());
    if has_collinear_triple(&flat) {
        return Ok(SolutionSet::empty(Reason::DegenerateConic, "three of the coplanar points are collinear"));
    }
    let mut raw = Vec::new();
    let (frame, note) = match Conic::through(&flat).shape() {
        ConicShape::Ellipse { center, major, a, b } => {
            let f = ConicFrame::new(center, major);
            let p = f.local(&local[5]);
            let (k1, k2) = (1.0 / (a * a), 1.0 / (b * b));
            for (apex, t) in central_branch(k1, k2, &p) {
                raw.push((apex, t));
            }
            let swapped = Vector3::new(p.y, p.x, p.z);
            for (apex, t) in central_branch(k2, k1, &swapped) {
                raw.push((Vector3::new(apex.y, apex.x, apex.z), Vector3::new(t.y, t.x, t.z)));
            }
            (f, if (a - b).abs() <= 1e-9 * a { "circle section" } else { "ellipse section" })
        }
        ConicShape::Hyperbola { center, transverse, a, b } => {
            let f = ConicFrame::new(center, transverse);
            let p = f.local(&local[5]);
            let (k1, k2) = (1.0 / (a * a), -1.0 / (b * b));
            raw.extend(central_branch(k1, k2, &p));
            let swapped = Vector3::new(p.y, p.x, p.z);
            for (apex, t) in central_branch(k2, k1, &swapped) {
                raw.push((Vector3::new(apex.y, apex.x, apex.z), Vector3::new(t.y, t.x, t.z)));
            }
            (f, "hyperbola section")
        }
        ConicShape::Parabola { vertex, axis, alpha } => {
            // Local x across the axis, local y along it.
            let f = ConicFrame::new(vertex, Vector2::new(axis.y, -axis.x));
            let p = f.local(&local[5]);
            raw.extend(parabola_branch(alpha, &p));
            (f, "parabola section")
        }
        ConicShape::Degenerate => {
            return Ok(SolutionSet::empty(Reason::DegenerateConic, "degenerate conic"));
        }
    };
    let samples: Vec<OrientedPoint> = local.iter().map(|p| OrientedPoint::plain(*p)).collect();
    let mut cones = Vec::new();
    for (apex, t) in raw {
        let t2 = t.norm_squared();
        if t2 <= 1.0 + 1e-9 {
            continue;
        }
        let apex = frame.point(apex.x, apex.y, apex.z);
        let dir = frame.dir(t.x, t.y, t.z);
        let Ok(cone) = Cone::new(apex, dir, (1.0 / t2.sqrt()).acos()) else { continue };
        if let Some(c) = accept(&cone, &samples) {
            push_unique(&mut cones, c);
        }
    }
    Ok(SolutionSet::finite(cones, Reason::CoplanarConic, note).transformed(&to_plane.inverse()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{RigidMotion, Surface};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Five points where a cone meets `z = 0` plus one more cone point.
    fn sliced(c: &Cone, rng: &mut ChaCha8Rng) -> ([Point3; 5], Point3) {
        let mut five = Vec::new();
        while five.len() < 5 {
            let g = c.sample(1.0, rng.random_range(0.0..std::f64::consts::TAU)) - c.apex;
            if g.z.abs() < 1e-3 {
                continue;
            }
            let s = -c.apex.z / g.z;
            five.push(c.apex + g * s);
        }
        let p6 = c.sample(rng.random_range(0.5..1.5), rng.random_range(0.0..std::f64::consts::TAU));
        (std::array::from_fn(|i| five[i]), p6)
    }

    fn check(c: &Cone, five: &[Point3; 5], p6: &Point3) -> SolutionSet<Cone> {
        let set = cones_coplanar5(five, p6).unwrap();
        assert!(set.len() <= 4, "{set:?}");
        for s in &set.primitives {
            for p in five.iter().chain([p6]) {
                assert!(s.residual(p).unwrap() < 1e-8);
            }
        }
        assert!(set.primitives.iter().any(|s| s.param_distance(c) < 1e-7), "{set:?} vs {c:?}");
        set
    }

    #[test]
    fn ellipse_and_hyperbola_sections() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let (mut ell, mut hyp) = (0, 0);
        for _ in 0..60 {
            let c = Cone::new(
                Point3::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5), rng.random_range(0.5..1.5)),
                crate::geom::random_unit(&mut rng),
                rng.random_range(0.3..1.1),
            )
            .unwrap();
            let (five, p6) = sliced(&c, &mut rng);
            let set = check(&c, &five, &p6);
            match set.diagnosis.note.as_str() {
                "ellipse section" => ell += 1,
                "hyperbola section" => hyp += 1,
                _ => {}
            }
        }
        assert!(ell > 5 && hyp > 5, "{ell} {hyp}");
    }

    #[test]
    fn circle_gives_two_symmetric_cones() {
        let m = RigidMotion::random(&mut ChaCha8Rng::seed_from_u64(5), 1.0);
        let five: [Point3; 5] = [0.0, 1.1, 2.3, 3.9, 5.1].map(|t: f64| m.apply(&Vector3::new(t.cos(), t.sin(), 0.0)));
        let c =
            Cone::new(m.apply(&Vector3::new(0.0, 0.0, 1.0)), m.apply_dir(&Vector3::z()), std::f64::consts::FRAC_PI_4)
                .unwrap();
        let p6 = c.sample(0.4, 0.7);
        let set = check(&c, &five, &p6);
        assert_eq!(set.len(), 2);
    }

    #[test]
    fn parabola_section() {
        // Axis at the half-angle from the plane z = 0, so one generatrix is
        // parallel to it.
        let c = Cone::new(Point3::new(0.0, 0.0, 1.0), Vector3::new(0.0, 0.6f64.cos(), -(0.6f64).sin()), 0.6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(102);
        let mut five = Vec::new();
        while five.len() < 5 {
            let g = c.sample(1.0, rng.random_range(0.0..std::f64::consts::TAU)) - c.apex;
            if g.z > -1e-2 {
                continue;
            }
            five.push(c.apex + g * (-c.apex.z / g.z));
        }
        let five: [Point3; 5] = std::array::from_fn(|i| five[i]);
        let p6 = c.sample(0.7, 2.0);
        let set = check(&c, &five, &p6);
        assert_eq!(set.diagnosis.note, "parabola section");
        assert!(set.len() <= 3);
    }
}
