use nalgebra::Vector3;

use super::coplanar::{cones_coplanar5, six_coplanar};
use super::{accept, push_unique};
use crate::conic::plane_frame;
use crate::cylinder::circumcircle;
use crate::error::{FitError, Result};
use crate::geom::{canonical_frame_points, Cone, OrientedPoint, Point3, Reason, Similarity, SolutionSet};
use crate::poly::{bivariate_solve, quad_homogeneous_roots, BiPoly, TriPoly};
use crate::tol;

/// Polynomial system for cones through six points in the canonical pattern
/// `p1 = 0`, `p2 = (x2, 0, 0)`, `p3 = (x3, y3, 0)`.
///
/// The cone is `|X - A|^2 - (t.(X - A))^2 = 0` with apex `A` and
/// `|t| = 1 / cos(half_angle)`. After eliminating the apex, `h5`, `h6` and
/// `h0` are even forms in `t = (l, m, n)`; with `u = l/n`, `v = m/n`,
/// `w = n^2`:
/// `h0 = w^3 P + w^2 Q + w R + S`, `h5 = w H + C`, `h6 = w K + D`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cone6PSystem {
    pub h0: TriPoly,
    pub h5: TriPoly,
    pub h6: TriPoly,
    pub p: BiPoly,
    pub q: BiPoly,
    pub r: BiPoly,
    pub s: f64,
    pub h: BiPoly,
    pub k: BiPoly,
    pub c: f64,
    pub d: f64,
    /// `C^3 P - C^2 Q H + C R H^2 - S H^3`.
    pub e0: BiPoly,
    /// `D H - C K`.
    pub e1: BiPoly,
    canon: [Point3; 6],
}

/// Apex offsets `(A0, B0, C0)` with `A = t k + (A0, B0, C0)`, each a
/// quadratic form plus constant in `t`.
struct Offsets {
    a0: TriPoly,
    b0: TriPoly,
    c0: TriPoly,
}

fn dot_t(p: &Point3) -> TriPoly {
    &(&(&TriPoly::l() * p.x) + &(&TriPoly::m() * p.y)) + &(&TriPoly::n() * p.z)
}

/// `|p|^2 - (t.p)^2`.
fn radial(p: &Point3) -> TriPoly {
    let tp = dot_t(p);
    &TriPoly::constant(p.norm_squared()) - &(&tp * &tp)
}

fn offsets(p2: &Point3, p3: &Point3, p4: &Point3) -> Offsets {
    let a0 = &radial(p2) * (0.5 / p2.x);
    let b0 = &(&radial(p3) - &(&a0 * (2.0 * p3.x))) * (0.5 / p3.y);
    let c0 = &(&(&radial(p4) - &(&a0 * (2.0 * p4.x))) - &(&b0 * (2.0 * p4.y))) * (0.5 / p4.z);
    Offsets { a0, b0, c0 }
}

impl Offsets {
    /// `|p|^2 - (t.p)^2 - 2 (A0, B0, C0).p`, zero when `p` is on the cone.
    fn condition(&self, p: &Point3) -> TriPoly {
        let lin = &(&(&self.a0 * p.x) + &(&self.b0 * p.y)) + &(&self.c0 * p.z);
        &radial(p) - &(&lin * 2.0)
    }

    fn eval(&self, t: &Vector3<f64>) -> Vector3<f64> {
        Vector3::new(self.a0.eval3(t.x, t.y, t.z), self.b0.eval3(t.x, t.y, t.z), self.c0.eval3(t.x, t.y, t.z))
    }
}

fn sigma(f: &TriPoly, degree: u32) -> BiPoly {
    f.homogeneous_part(degree).at_n1()
}

pub fn cone6p_system(points: &[Point3; 6]) -> Result<Cone6PSystem> {
    let [_, p2, p3, p4, p5, p6] = points;
    let scale = points.iter().fold(1.0f64, |m, p| m.max(p.norm()));
    if p2.x.abs() <= tol::ZERO * scale || p3.y.abs() <= tol::ZERO * scale || p4.z.abs() <= tol::ZERO * scale {
        return Err(FitError::ParticularConfiguration("x2, y3 or z4 vanishes"));
    }
    let off = offsets(p2, p3, p4);
    let yz = p3.y * p4.z;
    let h5 = &off.condition(p5) * yz;
    let h6 = &off.condition(p6) * yz;
    let (l, m, n) = (TriPoly::l(), TriPoly::m(), TriPoly::n());
    let t2 = &(&(&l * &l) + &(&m * &m)) + &(&n * &n);
    let v2 = &(&(&off.a0 * &off.a0) + &(&off.b0 * &off.b0)) + &(&off.c0 * &off.c0);
    let w = &(&(&off.a0 * &l) + &(&off.b0 * &m)) + &(&off.c0 * &n);
    let h0 = &(&(&w * &w) - &(&v2 * &(t2.clone() + -1.0))) * (4.0 * yz * yz);
    let (p, q, r) = (sigma(&h0, 6), sigma(&h0, 4), sigma(&h0, 2));
    let s = h0.coeff([0, 0, 0]);
    let (h, c) = (sigma(&h5, 2), h5.coeff([0, 0, 0]));
    let (k, d) = (sigma(&h6, 2), h6.coeff([0, 0, 0]));
    let e0 = &(&(&(&p * c.powi(3)) - &(&(&q * &h) * (c * c))) + &(&(&r * &(&h * &h)) * c)) - &(&h.pow(3) * s);
    let e1 = &(&h * d) - &(&k * c);
    Ok(Cone6PSystem { h0, h5, h6, p, q, r, s, h, k, c, d, e0, e1, canon: *points })
}

impl Cone6PSystem {
    /// Cone for a direction `t` with `|t| > 1`.
    fn cone_for(&self, t: &Vector3<f64>) -> Option<Cone> {
        let t2 = t.norm_squared();
        if t2 <= 1.0 + 1e-9 {
            return None;
        }
        let [_, p2, p3, p4, _, _] = &self.canon;
        let v = offsets(p2, p3, p4).eval(t);
        let k = t.dot(&v) / (1.0 - t2);
        let apex = t * k + v;
        Cone::new(apex, *t, (1.0 / t2.sqrt()).acos()).ok()
    }

    /// Directions from the common roots of `E0`, `E1` with `w > 0`.
    fn blown_up_directions(&self) -> Result<Vec<Vector3<f64>>> {
        let mut out = Vec::new();
        for (u, v) in bivariate_solve(&self.e0, &self.e1)? {
            let (kv, hv) = (self.k.eval2(u, v), self.h.eval2(u, v));
            let w = if kv.abs() >= hv.abs() { -self.d / kv } else { -self.c / hv };
            if !(w > tol::POSITIVE_W) || !w.is_finite() {
                continue;
            }
            let n = w.sqrt();
            out.push(Vector3::new(u * n, v * n, n));
        }
        Ok(out)
    }

    /// Directions with `n = 0`, solved along the lines `l = u m` and `m = 0`.
    fn horizontal_directions(&self) -> Vec<Vector3<f64>> {
        let h5 = self.h5.homogeneous_part(2).at_n0();
        let h6 = self.h6.homogeneous_part(2).at_n0();
        // D h5(l, m) - C h6(l, m) = 0 as a binary quadratic form.
        let form = &(&h5 * self.d) - &(&h6 * self.c);
        let (a, b, c) = (form.coeff([2, 0]), form.coeff([1, 1]), form.coeff([0, 2]));
        let h0 = &self.h0;
        let mut out = Vec::new();
        let Ok(roots) = quad_homogeneous_roots(a, b, c) else { return out };
        for root in roots {
            let (l, m) = (root.l, root.m);
            let (g5, g6) = (h5.eval2(l, m), h6.eval2(l, m));
            let g = if g5.abs() >= g6.abs() { -self.c / g5 } else { -self.d / g6 };
            if !(g > 0.0) || !g.is_finite() {
                continue;
            }
            let t = Vector3::new(l, m, 0.0) * g.sqrt();
            let bound = 1e-6 * h0.norm1() * (1.0 + t.norm()).powi(6);
            if h0.eval3(t.x, t.y, t.z).abs() <= bound {
                out.push(t);
            }
        }
        out
    }
}

/// All cones through six points.
pub fn cone_6p(points: &[Point3; 6]) -> Result<SolutionSet<Cone>> {
    let unit = Similarity::unit_box(points).map_err(|_| FitError::CoincidentPoints)?;
    let q: Vec<Point3> = points.iter().map(|p| unit.apply(p)).collect();
    for i in 0..6 {
        for j in i + 1..6 {
            if (q[i] - q[j]).norm() <= tol::COINCIDENT {
                return Err(FitError::CoincidentPoints);
            }
        }
    }
    if plane_frame(&q).1 <= tol::COPLANAR {
        return Ok(six_coplanar(&q));
    }
    for skip in (0..6).rev() {
        let five: Vec<Point3> = (0..6).filter(|&i| i != skip).map(|i| q[i]).collect();
        if plane_frame(&five).1 <= tol::COPLANAR {
            let idx: Vec<usize> = (0..6).filter(|&i| i != skip).collect();
            let five: [Point3; 5] = std::array::from_fn(|i| points[idx[i]]);
            return cones_coplanar5(&five, &points[skip]);
        }
    }
    // p1, p2, p3: the largest triangle; p4: the point farthest from its plane.
    let (i, j, k) = crate::cylinder::best_triple(&q);
    let plane = circumcircle(&q[i], &q[j], &q[k]).map_err(|_| FitError::ParticularConfiguration("collinear frame"))?;
    let nrm = *plane.plane_normal.as_vec();
    let mut rest: Vec<usize> = (0..6).filter(|x| ![i, j, k].contains(x)).collect();
    rest.sort_by(|&a, &b| (q[b] - q[i]).dot(&nrm).abs().total_cmp(&(q[a] - q[i]).dot(&nrm).abs()));
    let order = [i, j, k, rest[0], rest[1], rest[2]];
    let ordered: Vec<Point3> = order.iter().map(|&x| q[x]).collect();
    let frame = canonical_frame_points(&ordered)?;
    let to_canon = unit.then(&frame.motion.into());
    let cp: [Point3; 6] = std::array::from_fn(|x| frame.motion.apply(&ordered[x]));
    let sys = cone6p_system(&cp)?;
    let samples: Vec<OrientedPoint> = cp.iter().map(|p| OrientedPoint::plain(*p)).collect();
    let mut dirs = sys.blown_up_directions()?;
    dirs.extend(sys.horizontal_directions());
    let mut cones = Vec::new();
    for t in dirs {
        if let Some(c) = sys.cone_for(&t).and_then(|c| accept(&c, &samples)) {
            push_unique(&mut cones, c);
        }
    }
    let note = if cones.len() % 2 == 1 { "odd count, multiplicity 2 root merged" } else { "eigen solve" };
    Ok(SolutionSet::finite(cones, Reason::Generic, note).transformed(&to_canon.inverse()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{random_unit, Surface};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_cone(rng: &mut ChaCha8Rng) -> Cone {
        Cone::new(Point3::from_fn(|_, _| rng.random_range(-1.0..1.0)), random_unit(rng), rng.random_range(0.2..1.3))
            .unwrap()
    }

    fn canonical_on(c: &Cone, rng: &mut ChaCha8Rng) -> ([Point3; 6], Cone) {
        let raw: Vec<Point3> = (0..6)
            .map(|_| c.sample(rng.random_range(-2.0..2.0), rng.random_range(0.0..std::f64::consts::TAU)))
            .collect();
        let f = canonical_frame_points(&raw).unwrap();
        let pts = std::array::from_fn(|i| f.motion.apply(&raw[i]));
        (pts, c.transformed(&f.motion.into()))
    }

    fn is_even_at(f: &TriPoly, t: &Vector3<f64>) -> bool {
        let (a, b) = (f.eval3(t.x, t.y, t.z), f.eval3(-t.x, -t.y, -t.z));
        (a - b).abs() <= 1e-12 * (1.0 + a.abs())
    }

    fn planted_t(c: &Cone) -> Vector3<f64> {
        c.axis_dir.as_vec() / c.half_angle.cos()
    }

    #[test]
    fn forms_are_even_and_vanish_on_planted() {
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        for _ in 0..20 {
            let c = random_cone(&mut rng);
            let (pts, cc) = canonical_on(&c, &mut rng);
            let sys = cone6p_system(&pts).unwrap();
            let t = planted_t(&cc);
            for f in [&sys.h0, &sys.h5, &sys.h6] {
                assert!(f.terms().all(|(e, _)| e.iter().sum::<u32>() % 2 == 0));
                let r = random_unit(&mut rng);
                assert!(is_even_at(f, &r));
                assert!(f.eval3(t.x, t.y, t.z).abs() <= 1e-9 * f.norm1() * t.norm().powi(6));
            }
        }
    }

    #[test]
    fn printed_blocks() {
        let pts = [
            Point3::zeros(),
            Point3::new(1.3, 0.0, 0.0),
            Point3::new(0.4, 0.9, 0.0),
            Point3::new(-0.3, 0.5, 0.8),
            Point3::new(0.6, -0.7, 0.2),
            Point3::new(-0.9, 0.1, -0.5),
        ];
        let sys = cone6p_system(&pts).unwrap();
        let (x2, x3, y3, x4, y4, z4) = (pts[1].x, pts[2].x, pts[2].y, pts[3].x, pts[3].y, pts[3].z);
        let (xi, yi, zi) = (pts[4].x, pts[4].y, pts[4].z);
        let l2 = x2 * x3 * y4 * zi - x2 * x3 * yi * z4 - x2 * x4 * y3 * zi + x2 * xi * y3 * z4 - x3 * x3 * y4 * zi
            + x3 * x3 * yi * z4
            + x4 * x4 * y3 * zi
            - xi * xi * y3 * z4;
        assert!((sys.h5.coeff([2, 0, 0]) - l2).abs() < 1e-12);
        let n2 = y3 * z4 * z4 * zi - zi * zi * y3 * z4;
        assert!((sys.h5.coeff([0, 0, 2]) - n2).abs() < 1e-12);
        let l6 = -x2 * x2 * x3 * x3 * y4 * y4 - x2 * x2 * x3 * x3 * z4 * z4 + 2.0 * x2 * x2 * x3 * x4 * y3 * y4
            - x2 * x2 * x4 * x4 * y3 * y3
            + 2.0 * x2 * x3.powi(3) * y4 * y4
            + 2.0 * x2 * x3.powi(3) * z4 * z4
            - 2.0 * x2 * x3 * x3 * x4 * y3 * y4
            - 2.0 * x2 * x3 * x4 * x4 * y3 * y4
            + 2.0 * x2 * x4.powi(3) * y3 * y3
            - x3.powi(4) * y4 * y4
            - x3.powi(4) * z4 * z4
            + 2.0 * x3 * x3 * x4 * x4 * y3 * y4
            - x4.powi(4) * y3 * y3;
        assert!((sys.h0.coeff([6, 0, 0]) - l6).abs() < 1e-12, "{} vs {l6}", sys.h0.coeff([6, 0, 0]));
        assert_eq!(sys.e0.total_degree(), 6);
        assert_eq!(sys.e1.total_degree(), 2);
    }

    #[test]
    fn recovers_planted_cone() {
        let mut rng = ChaCha8Rng::seed_from_u64(92);
        let mut hits = 0;
        let trials = 100;
        for _ in 0..trials {
            let c = random_cone(&mut rng);
            let pts: [Point3; 6] = std::array::from_fn(|_| {
                c.sample(rng.random_range(-2.0..2.0), rng.random_range(0.0..std::f64::consts::TAU))
            });
            let set = cone_6p(&pts).unwrap();
            assert!(set.len() <= 12);
            if set.primitives.iter().any(|s| s.param_distance(&c) < 1e-6) {
                hits += 1;
            }
            for s in &set.primitives {
                for p in &pts {
                    assert!(s.residual(p).unwrap() < 1e-7);
                }
            }
        }
        assert!(hits >= 97, "{hits}");
    }
}
