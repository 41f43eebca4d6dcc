//! Gauss-Newton polishing of exact fits against their defining samples.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::geom::{angle_between, fold_angle, orthonormal_complement, Cone, Cylinder, OrientedPoint, Point3, Surface};

const STEPS: usize = 8;
const FD: f64 = 1e-7;

/// Minimizes `|r(x)|` from `x0 = 0` over a local chart, returning the best
/// chart coordinates seen.
fn gauss_newton(k: usize, r: impl Fn(&DVector<f64>) -> Option<DVector<f64>>) -> DVector<f64> {
    let mut x = DVector::zeros(k);
    let Some(mut fx) = r(&x) else { return x };
    for _ in 0..STEPS {
        let mut jac = DMatrix::zeros(fx.len(), k);
        for j in 0..k {
            let mut xp = x.clone();
            xp[j] += FD;
            let Some(fp) = r(&xp) else { return x };
            jac.set_column(j, &((fp - &fx) / FD));
        }
        let Ok(step) = jac.svd(true, true).solve(&fx, 1e-12) else { return x };
        let cand = &x - step;
        match r(&cand) {
            Some(fc) if fc.norm() < fx.norm() => {
                x = cand;
                fx = fc;
            }
            _ => break,
        }
        if fx.norm() < 1e-15 {
            break;
        }
    }
    x
}

fn chart_dir(d: &Vector3<f64>, a: f64, b: f64) -> Vector3<f64> {
    let (e1, e2) = orthonormal_complement(d);
    (d + e1 * a + e2 * b).normalize()
}

/// Polishes a cylinder so that it interpolates the samples more tightly.
/// Oriented samples contribute two tangency residuals each.
pub fn polish_cylinder(c: &Cylinder, samples: &[OrientedPoint]) -> Cylinder {
    let d0 = *c.axis_dir.as_vec();
    let (e1, e2) = orthonormal_complement(&d0);
    let build = |x: &DVector<f64>| {
        let d = chart_dir(&d0, x[0], x[1]);
        Cylinder::new(c.axis_point + e1 * x[2] + e2 * x[3], d, c.radius + x[4]).ok()
    };
    let x = gauss_newton(5, |x| {
        let cyl = build(x)?;
        Some(residual_vector(&cyl, samples))
    });
    build(&x).unwrap_or(*c)
}

/// Polishes a cone against its samples.
pub fn polish_cone(c: &Cone, samples: &[OrientedPoint]) -> Cone {
    let d0 = *c.axis_dir.as_vec();
    let build = |x: &DVector<f64>| {
        let d = chart_dir(&d0, x[0], x[1]);
        Cone::new(c.apex + Vector3::new(x[2], x[3], x[4]), d, c.half_angle + x[5]).ok()
    };
    let x = gauss_newton(6, |x| {
        let cone = build(x)?;
        Some(residual_vector(&cone, samples))
    });
    build(&x).unwrap_or(*c)
}

/// Signed positional residuals plus the two normal components orthogonal to
/// each oriented sample's normal.
fn residual_vector<S: Signed>(s: &S, samples: &[OrientedPoint]) -> DVector<f64> {
    let mut out = Vec::with_capacity(samples.len() * 3);
    for op in samples {
        out.push(s.signed_residual(&op.p));
        if let Some(n) = op.n {
            let g = s.normal_at(&op.p).unwrap_or_else(|_| Vector3::zeros());
            let g = g.try_normalize(0.0).unwrap_or_else(Vector3::zeros);
            let (u, v) = orthonormal_complement(n.as_vec());
            out.push(g.dot(&u));
            out.push(g.dot(&v));
        }
    }
    DVector::from_vec(out)
}

trait Signed: Surface {
    fn signed_residual(&self, p: &Point3) -> f64;
}

impl Signed for Cylinder {
    fn signed_residual(&self, p: &Point3) -> f64 {
        self.distance_to_axis(p) - self.radius
    }
}

impl Signed for Cone {
    fn signed_residual(&self, p: &Point3) -> f64 {
        let v = p - self.apex;
        fold_angle(angle_between(&v, self.axis_dir.as_vec())) - self.half_angle
    }
}

pub(crate) fn plain(pts: &[Point3]) -> Vec<OrientedPoint> {
    pts.iter().map(|p| OrientedPoint::plain(*p)).collect()
}
