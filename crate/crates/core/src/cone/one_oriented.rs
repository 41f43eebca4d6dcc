use nalgebra::Vector3;

use super::{accept, push_unique};
use crate::error::{FitError, Result};
use crate::geom::{canonical_frame_oriented, Cone, OrientedPoint, Point3, Reason, Similarity, SolutionSet};
use crate::poly::{bivariate_solve, BiPoly};
use crate::tol;

/// The cone equation through the origin with tangent plane `z = 0`, apex
/// `(a r, b r, 0)` and axis through `(0, 0, -r)`, with the `r` term dropped: `(a^2+b^2-1) z^2 - 2(ax+by) z + (bx-ay)^2`.
fn cone_form_without_r(p: &Point3) -> BiPoly {
    let (a, b) = (BiPoly::u(), BiPoly::v());
    let (x, y, z) = (p.x, p.y, p.z);
    let ab = &(&a * &a) + &(&b * &b);
    let t1 = (ab.clone() + -1.0) * (z * z);
    let t2 = (&(&a * x) + &(&b * y)) * (-2.0 * z);
    let w = &(&b * x) - &(&a * y);
    &(&t1 + &t2) + &(&w * &w)
}

/// `z_i F(p2) - z2 F(p_i)` for `i = 3, 4`, quadratics in the apex
/// coordinates `(a, b)`. Canonical frame,
/// `z2 != 0`.
pub fn cone_1n3p_quadrics(p2: &Point3, p3: &Point3, p4: &Point3) -> Result<(BiPoly, BiPoly)> {
    if p2.z.abs() <= tol::ZERO {
        return Err(FitError::CoplanarInput);
    }
    let f2 = cone_form_without_r(p2);
    let g = |pi: &Point3| &(&f2 * pi.z) - &(&cone_form_without_r(pi) * p2.z);
    Ok((g(p3), g(p4)))
}

/// Points that share the tangent plane at the oriented point lie on the
/// cone only along the generatrix through it.
fn normal_plane_case(p: &[Point3; 3]) -> SolutionSet<Cone> {
    let far = (0..3).max_by(|&i, &j| p[i].norm().total_cmp(&p[j].norm())).unwrap_or(0);
    let d = p[far].normalize();
    if p.iter().all(|q| q.cross(&d).norm() <= tol::COPLANAR) {
        SolutionSet::infinite(
            Reason::NormalPlaneCoplanar,
            "points on one line through the oriented point in its tangent plane",
        )
    } else {
        SolutionSet::empty(Reason::NormalPlaneCoplanar, "points in the tangent plane off a single line")
    }
}

/// All cones through an oriented point and three further points.
pub fn cone_1n3p(op1: &OrientedPoint, p2: &Point3, p3: &Point3, p4: &Point3) -> Result<SolutionSet<Cone>> {
    op1.normal()?;
    let pts = [op1.p, *p2, *p3, *p4];
    let unit = Similarity::unit_box(&pts).map_err(|_| FitError::CoincidentPoints)?;
    let q: Vec<Point3> = pts.iter().map(|p| unit.apply(p)).collect();
    for i in 0..4 {
        for j in i + 1..4 {
            if (q[i] - q[j]).norm() <= tol::COINCIDENT {
                return Err(FitError::CoincidentPoints);
            }
        }
    }
    let frame = canonical_frame_oriented(&OrientedPoint { p: q[0], n: op1.n })?;
    let to_canon = unit.then(&frame.into());
    let mut c: [Point3; 3] = [to_canon.apply(p2), to_canon.apply(p3), to_canon.apply(p4)];
    if c.iter().all(|p| p.z.abs() <= tol::COPLANAR) {
        return Ok(normal_plane_case(&c));
    }
    // Reference point with the largest |z|.
    let k = (0..3).max_by(|&i, &j| c[i].z.abs().total_cmp(&c[j].z.abs())).unwrap_or(0);
    c.swap(0, k);
    let (g3, g4) = cone_1n3p_quadrics(&c[0], &c[1], &c[2])?;
    let samples = [
        OrientedPoint::oriented(Point3::zeros(), Vector3::z())?,
        OrientedPoint::plain(c[0]),
        OrientedPoint::plain(c[1]),
        OrientedPoint::plain(c[2]),
    ];
    let (x2, y2, z2) = (c[0].x, c[0].y, c[0].z);
    let mut cones = Vec::new();
    for (a, b) in bivariate_solve(&g3, &g4)? {
        let s = a * a + b * b;
        if s <= tol::POSITIVE_W {
            continue;
        }
        // F(p2) = 0 is linear in r.
        let rest = (s - 1.0) * z2 * z2 - 2.0 * (a * x2 + b * y2) * z2 + (b * x2 - a * y2).powi(2);
        let r = -rest / (2.0 * s * z2);
        if !r.is_finite() || r.abs() <= tol::ZERO {
            continue;
        }
        let apex = Vector3::new(a * r, b * r, 0.0);
        let half = (s / (s + 1.0)).sqrt().acos();
        let Ok(cone) = Cone::new(apex, Vector3::new(a, b, 1.0), half) else { continue };
        if let Some(cone) = accept(&cone, &samples) {
            push_unique(&mut cones, cone);
        }
    }
    let note = if cones.len() % 2 == 1 { "odd count, multiplicity 2 root merged" } else { "eigen solve" };
    Ok(SolutionSet::finite(cones, Reason::Generic, note).transformed(&to_canon.inverse()))
}
