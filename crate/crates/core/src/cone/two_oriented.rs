use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{accept, push_unique};
use crate::error::{FitError, Result};
use crate::geom::{
    angle_between, canonical_frame_oriented, fold_angle, Cone, Dir3, OrientedPoint, Point3, Reason, Similarity,
    SolutionSet,
};
use crate::tol;

/// A line through `point` along `dir`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Line3 {
    pub point: Point3,
    pub dir: Dir3,
}

/// Lines attached to two oriented points: the two normal lines and the
/// intersection of the two normal planes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cone2NGeometry {
    pub l1: Line3,
    pub l2: Line3,
    /// `None` when the normals are parallel.
    pub l: Option<Line3>,
    /// Meeting point of the two normal lines, if they meet.
    pub intersect_q: Option<Point3>,
}

/// Closest points of two lines; `None` when parallel.
fn closest_points(a: &Line3, b: &Line3) -> Option<(Point3, Point3)> {
    let (u, v) = (a.dir.as_vec(), b.dir.as_vec());
    let w = a.point - b.point;
    let (uv, uw, vw) = (u.dot(v), u.dot(&w), v.dot(&w));
    let den = 1.0 - uv * uv;
    if den <= 1e-24 {
        return None;
    }
    let s = (uv * vw - uw) / den;
    let t = (vw - uv * uw) / den;
    Some((a.point + u * s, b.point + v * t))
}

pub fn cone_2n_geometry(op1: &OrientedPoint, op2: &OrientedPoint) -> Result<Cone2NGeometry> {
    let (n1, n2) = (op1.normal()?, op2.normal()?);
    let l1 = Line3 { point: op1.p, dir: n1 };
    let l2 = Line3 { point: op2.p, dir: n2 };
    let cross = n1.as_vec().cross(n2.as_vec());
    let l = Dir3::new(cross).ok().map(|dir| {
        // Point on both planes closest to the origin of the first plane.
        let (a, b) = (n1.as_vec(), n2.as_vec());
        let (da, db) = (a.dot(&op1.p), b.dot(&op2.p));
        let c2 = cross.norm_squared();
        let point = (b.cross(&cross) * da + cross.cross(a) * db) / c2;
        Line3 { point, dir }
    });
    let scale = 1.0 + op1.p.norm().max(op2.p.norm());
    let intersect_q = closest_points(&l1, &l2)
        .filter(|(x, y)| (x - y).norm() <= tol::COPLANAR * scale * 10.0)
        .map(|(x, y)| (x + y) / 2.0);
    Ok(Cone2NGeometry { l1, l2, l, intersect_q })
}

/// The root pair of the two constraints that is independent of the sign
/// choice, for canonical data (`p1 = 0`, `n1 = z`).
pub fn cone_2n_spurious_branch(p2: &Point3, n2: &Vector3<f64>) -> (f64, f64) {
    let (x2, y2, z2) = (p2.x, p2.y, p2.z);
    let (a2, b2, c2) = (n2.x, n2.y, n2.z);
    let h = a2 * a2 + b2 * b2;
    let l1 = (a2 * a2 * z2 - a2 * c2 * x2 + b2 * b2 * z2 - b2 * c2 * y2) / h;
    let l2 = -(a2 * x2 + b2 * y2) / h;
    (l1, l2)
}

/// Cone with apex on the plane `z = 0`, for canonical data and a chosen
/// pair of points on the two normal lines.
fn generic_cone(p2: &Point3, n2: &Vector3<f64>, lam1: f64, lam2: f64) -> Option<Cone> {
    let den = p2.z + lam2 * n2.z - lam1;
    if !lam1.is_finite() || !lam2.is_finite() || den.abs() <= tol::ZERO {
        return None;
    }
    let apex = Vector3::new(-lam1 * (p2.x + lam2 * n2.x) / den, -lam1 * (p2.y + lam2 * n2.y) / den, 0.0);
    let q1 = Vector3::new(0.0, 0.0, lam1);
    let q2 = p2 + n2 * lam2;
    let axis = q2 - q1;
    let angle = fold_angle(angle_between(&-apex, &axis));
    Cone::new(apex, axis, angle).ok()
}

/// The two cones sharing the apex where the in-plane normals to both
/// normal lines meet.
fn shared_apex_cones(p2: &Point3, n2: &Vector3<f64>) -> Vec<Cone> {
    // The plane of the two normal lines contains z and p2.
    let Some(e) = Vector3::new(p2.x, p2.y, 0.0).try_normalize(1e-300) else {
        return Vec::new();
    };
    // In-plane coordinates (s along e, z). N1: z = 0. N2: through p2,
    // orthogonal to n2.
    let (s2, z2) = (p2.dot(&e), p2.z);
    let (ns, nz) = (n2.dot(&e), n2.z);
    if ns.abs() <= tol::ZERO {
        return Vec::new();
    }
    // ns (s - s2) + nz (0 - z2) = 0.
    let s = s2 + nz * z2 / ns;
    let omega = e * s;
    let (u1, u2) = ((-omega).try_normalize(0.0), (p2 - omega).try_normalize(0.0));
    let (Some(u1), Some(u2)) = (u1, u2) else { return Vec::new() };
    [u1 + u2, u1 - u2]
        .iter()
        .filter_map(|axis| {
            let angle = fold_angle(angle_between(&u1, axis));
            Cone::new(omega, *axis, angle).ok()
        })
        .collect()
}

/// All cones through two oriented points.
pub fn cone_2n(op1: &OrientedPoint, op2: &OrientedPoint) -> Result<SolutionSet<Cone>> {
    op1.normal()?;
    op2.normal()?;
    let unit = Similarity::unit_box(&[op1.p, op2.p]).map_err(|_| FitError::CoincidentPoints)?;
    let q1 = OrientedPoint { p: unit.apply(&op1.p), n: op1.n };
    let frame = canonical_frame_oriented(&q1)?;
    let to_canon = unit.then(&frame.into());
    let p2 = to_canon.apply(&op2.p);
    let n2 = to_canon.apply_dir(op2.normal()?.as_vec()).normalize();
    if p2.norm() <= tol::COINCIDENT {
        return Err(FitError::CoincidentPoints);
    }
    let samples = [OrientedPoint::oriented(Point3::zeros(), Vector3::z())?, OrientedPoint::oriented(p2, n2)?];
    let h = (n2.x * n2.x + n2.y * n2.y).sqrt();
    if h <= tol::COPLANAR {
        return Ok(if p2.z.abs() <= tol::COPLANAR {
            SolutionSet::infinite(Reason::ParallelNormals, "parallel normals, second point in the first normal plane")
        } else {
            SolutionSet::empty(Reason::ParallelNormals, "parallel normals")
        });
    }
    let geom = cone_2n_geometry(&samples[0], &samples[1])?;
    let mut cones = Vec::new();
    let (candidates, reason, note) = if let Some(q) = geom.intersect_q {
        if (q.norm() - (q - p2).norm()).abs() <= tol::COPLANAR * 10.0 {
            return Ok(SolutionSet::infinite(
                Reason::EquidistantIntersection,
                "normal lines meet at a point equidistant from both points",
            ));
        }
        (shared_apex_cones(&p2, &n2), Reason::IntersectingNormals, "two cones sharing an apex")
    } else {
        let pn = p2.dot(&n2);
        let v: Vec<Cone> =
            [n2.z - 1.0, n2.z + 1.0].iter().filter_map(|d| generic_cone(&p2, &n2, pn / d, -p2.z / d)).collect();
        (v, Reason::Generic, "two closed-form cones")
    };
    for c in candidates {
        if let Some(c) = accept(&c, &samples) {
            push_unique(&mut cones, c);
        }
    }
    Ok(SolutionSet::finite(cones, reason, note).transformed(&to_canon.inverse()))
}
