use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{FitError, Result};
use crate::geom::{canonical_frame_oriented, Cylinder, OrientedPoint, Point3, Reason, Similarity, SolutionSet};
use crate::poly::{quad_homogeneous_roots, HomRoot};
use crate::tol;

/// Below this magnitude `a`, `b` and `c` are all treated as zero.
const ABC_ZERO: f64 = 1e-12;

/// Coefficients of the direction quadratic `a l^2 + b l m + c m^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cyl1N2PCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub delta: f64,
}

/// Coefficients for points already in the canonical frame of the oriented
/// point (origin, normal `+z`).
pub fn cyl_1n2p_coeffs(p2: &Point3, p3: &Point3) -> Cyl1N2PCoeffs {
    let det = |a1: f64, b1: f64, a2: f64, b2: f64| a1 * b2 - a2 * b1;
    let (x2, y2, z2) = (p2.x, p2.y, p2.z);
    let (x3, y3, z3) = (p3.x, p3.y, p3.z);
    let a = det(y2 * y2 + z2 * z2, z2, y3 * y3 + z3 * z3, z3);
    let b = -2.0 * det(x2 * y2, z2, x3 * y3, z3);
    let c = det(x2 * x2 + z2 * z2, z2, x3 * x3 + z3 * z3, z3);
    Cyl1N2PCoeffs { a, b, c, delta: b * b - 4.0 * a * c }
}

/// Cylinder with axis direction `(l, m, 0)` through the canonical pair.
fn canonical_cylinder(root: &HomRoot, p2: &Point3, p3: &Point3) -> Option<Cylinder> {
    let p = if p2.z.abs() >= p3.z.abs() { p2 } else { p3 };
    if p.z.abs() <= tol::ZERO {
        return None;
    }
    let yp = -p.x * root.m + p.y * root.l;
    let r = (yp * yp + p.z * p.z) / (2.0 * p.z);
    Cylinder::new(Vector3::new(0.0, 0.0, r), Vector3::new(root.l, root.m, 0.0), r.abs()).ok()
}

/// All cylinders through an oriented point and two further points.
pub fn cyl_1n2p(op1: &OrientedPoint, p2: &Point3, p3: &Point3) -> Result<SolutionSet<Cylinder>> {
    op1.normal()?;
    let pts = [op1.p, *p2, *p3];
    let Ok(unit) = Similarity::unit_box(&pts) else {
        return Ok(SolutionSet::infinite(Reason::CoincidentPoints, "all three points coincide"));
    };
    let q: Vec<Point3> = pts.iter().map(|p| unit.apply(p)).collect();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if (q[i] - q[j]).norm() <= tol::COINCIDENT {
            return Ok(SolutionSet::infinite(
                Reason::CoincidentPoints,
                "two of the points coincide; any direction normal to the normal works",
            ));
        }
    }
    let frame = canonical_frame_oriented(&OrientedPoint { p: q[0], n: op1.n })?;
    let to_canon = unit.then(&frame.into());
    let (c2, c3) = (to_canon.apply(p2), to_canon.apply(p3));
    let (z2, z3) = (c2.z, c3.z);
    if z2 * z3 < 0.0 && z2.abs() > tol::ZERO && z3.abs() > tol::ZERO {
        return Ok(SolutionSet::empty(
            Reason::OppositeSides,
            "the two points lie on opposite sides of the normal plane",
        ));
    }
    let k = cyl_1n2p_coeffs(&c2, &c3);
    if k.a.abs() <= ABC_ZERO && k.b.abs() <= ABC_ZERO && k.c.abs() <= ABC_ZERO {
        let set = if z2.abs() <= tol::ZERO && z3.abs() <= tol::ZERO {
            SolutionSet::infinite(Reason::NormalPlaneCoplanar, "all points lie in the plane normal to the normal")
        } else {
            SolutionSet::infinite(Reason::MirrorSymmetric, "the two points are symmetric about the normal line")
        };
        return Ok(set);
    }
    let roots = quad_homogeneous_roots(k.a, k.b, k.c).map_err(|_| FitError::DegenerateQuadratic)?;
    let double = roots.iter().any(|r| r.multiplicity == 2);
    let cyls: Vec<Cylinder> = roots.iter().filter_map(|r| canonical_cylinder(r, &c2, &c3)).collect();
    let note = if double {
        "double direction, multiplicity 2"
    } else if cyls.is_empty() {
        "negative discriminant"
    } else {
        "two real directions"
    };
    Ok(SolutionSet::finite(cyls, Reason::Generic, note).transformed(&to_canon.inverse()))
}
