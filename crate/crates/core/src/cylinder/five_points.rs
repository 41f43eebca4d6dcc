use nalgebra::Vector3;

use super::circle::{best_triple, circumcircle};
use super::coplanar::cyl_coplanar5;
use crate::conic::plane_frame;
use crate::error::{FitError, Result};
use crate::geom::{canonical_frame_points, cylinder_residual, Cylinder, Point3, Reason, Similarity, SolutionSet};
use crate::poly::{bivariate_solve, BiPoly, TriPoly};
use crate::refine::{plain, polish_cylinder};
use crate::tol;

fn c(x: f64) -> TriPoly {
    TriPoly::constant(x)
}

fn det3(m: [[&TriPoly; 3]; 3]) -> TriPoly {
    let minor = |a: &TriPoly, b: &TriPoly, cc: &TriPoly, d: &TriPoly| &(a * d) - &(b * cc);
    let t0 = m[0][0] * &minor(m[1][1], m[1][2], m[2][1], m[2][2]);
    let t1 = m[0][1] * &minor(m[1][0], m[1][2], m[2][0], m[2][2]);
    let t2 = m[0][2] * &minor(m[1][0], m[1][1], m[2][0], m[2][1]);
    &(&t0 - &t1) + &t2
}

/// `|t|^2 |p|^2 - (t.p)^2`, the squared norm of `p` projected orthogonally
/// to `t = (l, m, n)`, scaled by `|t|^2`.
fn projected_norm(p: &Point3) -> TriPoly {
    let (l, m, n) = (TriPoly::l(), TriPoly::m(), TriPoly::n());
    let t2 = &(&(&l * &l) + &(&m * &m)) + &(&n * &n);
    let tp = &(&(&l * p.x) + &(&m * p.y)) + &(&n * p.z);
    &(&t2 * p.norm_squared()) - &(&tp * &tp)
}

/// Cubic cocyclicity condition on the direction `(l, m, n)` for four points
/// in the canonical pattern `p1 = 0`, `p2 = (x2, 0, 0)`, `p3 = (x3, y3, 0)`.
pub fn cyl5p_cubic(points: &[Point3; 4]) -> TriPoly {
    let [_, p2, p3, p4] = points;
    let (l, m, n) = (TriPoly::l(), TriPoly::m(), TriPoly::n());
    let x2 = p2.x;
    let zero = c(0.0);
    let (cx3, cy3, cx4, cy4, cz4) = (c(p3.x), c(p3.y), c(p4.x), c(p4.y), c(p4.z));
    let first = det3([[&l, &cx3, &cx4], [&m, &cy3, &cy4], [&n, &zero, &cz4]]);
    let mn = &(&m * &m) + &(&n * &n);
    let (n3, n4) = (projected_norm(p3), projected_norm(p4));
    let second = det3([[&m, &cy3, &cy4], [&n, &zero, &cz4], [&zero, &n3, &n4]]);
    &(&(&mn * &first) * (x2 * x2)) - &(&second * x2)
}

/// Quadratic quotient of the cubic for point `pj` by `x2 n`.
pub fn cyl5p_quotient(p2: &Point3, p3: &Point3, pj: &Point3) -> TriPoly {
    let (x2, x3, y3) = (p2.x, p3.x, p3.y);
    let (xj, yj, zj) = (pj.x, pj.y, pj.z);
    TriPoly::from_terms([
        ([2, 0, 0], -yj * y3 * y3 + yj * yj * y3 + zj * zj * y3),
        ([1, 1, 0], 2.0 * yj * y3 * x3 - 2.0 * yj * xj * y3),
        ([1, 0, 1], zj * (x2 * y3 - 2.0 * xj * y3)),
        ([0, 2, 0], x2 * yj * x3 - x2 * xj * y3 - yj * x3 * x3 + xj * xj * y3 + zj * zj * y3),
        ([0, 1, 1], zj * (-x2 * x3 + x3 * x3 + y3 * y3 - 2.0 * yj * y3)),
        ([0, 0, 2], x2 * yj * x3 - x2 * xj * y3 - yj * x3 * x3 + xj * xj * y3 - yj * y3 * y3 + yj * yj * y3),
    ])
}

/// The two polynomials whose common zeros vanish on the three chord
/// directions `(p1 p2)`, `(p1 p3)`, `(p2 p3)`: `F = x2 n` and
/// `G = (m x3 - m x2 - l y3)(m x3 - l y3) m x2`.
pub fn cyl5p_chord_polys(p2: &Point3, p3: &Point3) -> (TriPoly, TriPoly) {
    let (l, m) = (TriPoly::l(), TriPoly::m());
    let (x2, x3, y3) = (p2.x, p3.x, p3.y);
    let f = TriPoly::n() * x2;
    let g1 = &(&m * (x3 - x2)) - &(&l * y3);
    let g2 = &(&m * x3) - &(&l * y3);
    let g = &(&(&g1 * &g2) * &m) * x2;
    (f, g)
}

/// Reduced system: the cubic of the point with larger `|z|` among `p4, p5`
/// and `Delta = z5 D4 - z4 D5`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cyl5PSystem {
    pub cubic: TriPoly,
    pub delta: TriPoly,
    /// Index (4 or 5) of the point used for `cubic`.
    pub pivot: usize,
}

pub fn cyl5p_reduced_system(points: &[Point3; 5]) -> Result<Cyl5PSystem> {
    let [p1, p2, p3, p4, p5] = points;
    if p4.z.abs() <= tol::ZERO && p5.z.abs() <= tol::ZERO {
        return Err(FitError::CoplanarInput);
    }
    let d4 = cyl5p_quotient(p2, p3, p4);
    let d5 = cyl5p_quotient(p2, p3, p5);
    let delta = &(&d4 * p5.z) - &(&d5 * p4.z);
    let (pivot, pj) = if p4.z.abs() >= p5.z.abs() { (4, p4) } else { (5, p5) };
    let cubic = cyl5p_cubic(&[*p1, *p2, *p3, *pj]);
    Ok(Cyl5PSystem { cubic, delta, pivot })
}

/// Cylinder of direction `t` through the points, if their projections are
/// cocyclic.
fn cylinder_along(t: Vector3<f64>, pts: &[Point3]) -> Option<Cylinder> {
    let t = t.try_normalize(0.0)?;
    let q: Vec<Point3> = pts.iter().map(|p| p - t * p.dot(&t)).collect();
    let (i, j, k) = best_triple(&q);
    let circle = circumcircle(&q[i], &q[j], &q[k]).ok()?;
    let ok = q.iter().all(|p| ((p - circle.center).norm() - circle.radius).abs() <= tol::CIRCLE);
    if !ok {
        return None;
    }
    let c = Cylinder::new(circle.center, t, circle.radius).ok()?;
    let c = polish_cylinder(&c, &plain(pts));
    let valid = pts.iter().all(|p| cylinder_residual(&c, p) <= tol::VALIDATE);
    valid.then_some(c)
}

fn push_unique(out: &mut Vec<Cylinder>, c: Cylinder) {
    let dup = out.iter().any(|o| {
        o.axis_dir.line_distance(&c.axis_dir) <= 1e-6 && (o.radius - c.radius).abs() <= 1e-6 * (1.0 + c.radius)
    });
    if !dup {
        out.push(c);
    }
}

/// All cylinders through five points.
pub fn cyl_5p(points: &[Point3; 5]) -> Result<SolutionSet<Cylinder>> {
    let unit = Similarity::unit_box(points)?;
    let q: Vec<Point3> = points.iter().map(|p| unit.apply(p)).collect();
    for i in 0..5 {
        for j in i + 1..5 {
            if (q[i] - q[j]).norm() <= tol::COINCIDENT {
                return Err(FitError::CoincidentPoints);
            }
        }
    }
    if plane_frame(&q).1 <= tol::COPLANAR {
        return cyl_coplanar5(points);
    }
    // Largest triangle first for a well-conditioned frame.
    let (i, j, k) = best_triple(&q);
    let rest: Vec<usize> = (0..5).filter(|x| ![i, j, k].contains(x)).collect();
    let order = [i, j, k, rest[0], rest[1]];
    let ordered: Vec<Point3> = order.iter().map(|&x| q[x]).collect();
    let frame = canonical_frame_points(&ordered)?;
    let to_canon = unit.then(&frame.motion.into());
    let cp: [Point3; 5] = std::array::from_fn(|x| frame.motion.apply(&ordered[x]));
    let sys = cyl5p_reduced_system(&cp)?;
    let f: BiPoly = sys.cubic.at_n1();
    let g: BiPoly = sys.delta.at_n1();
    let mut dirs: Vec<Vector3<f64>> =
        bivariate_solve(&f, &g)?.into_iter().map(|(l, m)| Vector3::new(l, m, 1.0)).collect();
    let scale = sys.delta.norm1();
    for t in [
        Vector3::new(1.0, 0.0, 0.0),
        Vector3::new(cp[2].x, cp[2].y, 0.0).normalize(),
        Vector3::new(cp[2].x - cp[1].x, cp[2].y, 0.0).normalize(),
    ] {
        if sys.delta.eval3(t.x, t.y, t.z).abs() <= 1e-9 * scale {
            dirs.push(t);
        }
    }
    let mut cyls = Vec::new();
    for t in dirs {
        if let Some(c) = cylinder_along(t, &cp) {
            push_unique(&mut cyls, c);
        }
    }
    let note = format!("{} real directions verified", cyls.len());
    Ok(SolutionSet::finite(cyls, Reason::Generic, note).transformed(&to_canon.inverse()))
}
