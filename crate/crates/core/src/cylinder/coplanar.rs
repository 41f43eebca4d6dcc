use nalgebra::{Vector2, Vector3};

use crate::conic::{all_collinear, collinearity, plane_frame, Conic, ConicShape, SHAPE_TOL};
use crate::error::{FitError, Result};
use crate::geom::{Cylinder, Point3, Reason, Similarity, SolutionSet};
use crate::tol;

/// Largest collinear subset of size at least three, if any.
fn collinear_subset(q: &[Vector2<f64>]) -> Option<Vec<usize>> {
    let n = q.len();
    let mut best: Option<Vec<usize>> = None;
    for i in 0..n {
        for j in i + 1..n {
            let on: Vec<usize> =
                (0..n).filter(|&k| k == i || k == j || collinearity(&q[i], &q[j], &q[k]) <= SHAPE_TOL).collect();
            if on.len() >= 3 && best.as_ref().is_none_or(|b| on.len() > b.len()) {
                best = Some(on);
            }
        }
    }
    best
}

/// Cylinders through five coplanar points.
///
/// A plane cuts a cylinder in an ellipse, or in a pair of parallel lines
/// when it contains the axis direction.
pub fn cyl_coplanar5(points: &[Point3; 5]) -> Result<SolutionSet<Cylinder>> {
    let unit = Similarity::unit_box(points).map_err(|_| FitError::CoincidentPoints)?;
    let q: Vec<Point3> = points.iter().map(|p| unit.apply(p)).collect();
    for i in 0..5 {
        for j in i + 1..5 {
            if (q[i] - q[j]).norm() <= tol::COINCIDENT {
                return Err(FitError::CoincidentPoints);
            }
        }
    }
    let (motion, _) = plane_frame(&q);
    let to_plane = unit.then(&motion.into());
    let flat: Vec<Vector2<f64>> = q.iter().map(|p| motion.apply(p).xy()).collect();
    if all_collinear(&flat) {
        return Ok(SolutionSet::infinite(Reason::CollinearPoints, "all points on one line"));
    }
    if let Some(line) = collinear_subset(&flat) {
        let rest: Vec<usize> = (0..5).filter(|k| !line.contains(k)).collect();
        let parallel = match rest.as_slice() {
            [_] => true,
            [a, b] => {
                let d = (flat[line[1]] - flat[line[0]]).normalize();
                let e = (flat[*b] - flat[*a]).normalize();
                (d.x * e.y - d.y * e.x).abs() <= SHAPE_TOL
            }
            _ => false,
        };
        return Ok(if parallel {
            SolutionSet::infinite(Reason::DegenerateConic, "points on two parallel lines")
        } else {
            SolutionSet::empty(Reason::DegenerateConic, "points on two intersecting lines")
        });
    }
    let five: [Vector2<f64>; 5] = std::array::from_fn(|i| flat[i]);
    let (center, major, a, b) = match Conic::through(&five).shape() {
        ConicShape::Ellipse { center, major, a, b } => (center, major, a, b),
        ConicShape::Degenerate => {
            return Ok(SolutionSet::empty(Reason::DegenerateConic, "degenerate conic"));
        }
        _ => return Ok(SolutionSet::empty(Reason::CoplanarConic, "conic is not an ellipse")),
    };
    let normal = Vector3::z();
    let e = Vector3::new(major.x, major.y, 0.0);
    let cos = (b / a).min(1.0);
    let sin = (1.0 - cos * cos).max(0.0).sqrt();
    let c3 = Vector3::new(center.x, center.y, 0.0);
    let mut cyls = vec![Cylinder::new(c3, normal * cos + e * sin, b)?];
    if a - b > 1e-6 * a {
        cyls.push(Cylinder::new(c3, normal * cos - e * sin, b)?);
    }
    let note = if cyls.len() == 1 { "circle section" } else { "ellipse section" };
    Ok(SolutionSet::finite(cyls, Reason::CoplanarConic, note).transformed(&to_plane.inverse()))
}
