//! Plane conics through coplanar points.

use nalgebra::{Matrix2, Matrix3, SMatrix, SymmetricEigen, Vector2, Vector3};

use crate::geom::{Point3, RigidMotion};

/// Relative tolerance for collinearity and conic-type decisions.
pub const SHAPE_TOL: f64 = 1e-9;

/// `A x^2 + B xy + C y^2 + D x + E y + F = 0`, coefficient vector of unit norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Conic {
    pub coeffs: [f64; 6],
}

/// Metric description of a nondegenerate real conic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConicShape {
    /// Semi-axes `a >= b > 0`; `major` is the unit direction of the `a` axis.
    Ellipse { center: Vector2<f64>, major: Vector2<f64>, a: f64, b: f64 },
    /// `x^2/a^2 - y^2/b^2 = 1` in the frame whose x axis is `transverse`.
    Hyperbola { center: Vector2<f64>, transverse: Vector2<f64>, a: f64, b: f64 },
    /// `x^2 = alpha y`, `alpha > 0`, in the frame with origin `vertex` and y
    /// axis `axis` (the opening direction).
    Parabola { vertex: Vector2<f64>, axis: Vector2<f64>, alpha: f64 },
    /// Line pairs, double lines, points or empty conics.
    Degenerate,
}

fn row(p: &Vector2<f64>) -> [f64; 6] {
    [p.x * p.x, p.x * p.y, p.y * p.y, p.x, p.y, 1.0]
}

impl Conic {
    /// The conic through five points (smallest right singular vector).
    pub fn through(pts: &[Vector2<f64>; 5]) -> Conic {
        let mut m = SMatrix::<f64, 6, 6>::zeros();
        for (i, p) in pts.iter().enumerate() {
            m.set_row(i, &SMatrix::<f64, 1, 6>::from_row_slice(&row(p)));
        }
        let svd = m.svd(false, true);
        let vt = svd.v_t.expect("requested V");
        let (k, _) =
            svd.singular_values.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("six singular values");
        let v = vt.row(k);
        Conic { coeffs: [v[0], v[1], v[2], v[3], v[4], v[5]] }
    }

    pub fn eval(&self, p: &Vector2<f64>) -> f64 {
        row(p).iter().zip(&self.coeffs).map(|(a, b)| a * b).sum()
    }

    /// Symmetric 3x3 matrix of the conic in homogeneous coordinates.
    pub fn matrix(&self) -> Matrix3<f64> {
        let [a, b, c, d, e, f] = self.coeffs;
        Matrix3::new(a, b / 2.0, d / 2.0, b / 2.0, c, e / 2.0, d / 2.0, e / 2.0, f)
    }

    pub fn shape(&self) -> ConicShape {
        let [a, b, c, d, e, f] = self.coeffs;
        let quad = Matrix2::new(a, b / 2.0, b / 2.0, c);
        let scale = a.abs().max(b.abs()).max(c.abs());
        if scale <= SHAPE_TOL || self.matrix().determinant().abs() <= 1e-12 {
            return ConicShape::Degenerate;
        }
        let eig = SymmetricEigen::new(quad);
        let (l0, l1) = (eig.eigenvalues[0], eig.eigenvalues[1]);
        let (e0, e1) = (eig.eigenvectors.column(0).into_owned(), eig.eigenvectors.column(1).into_owned());
        let disc = a * c - b * b / 4.0;
        if disc.abs() <= SHAPE_TOL * scale * scale {
            // One eigenvalue vanishes: parabola along the null direction.
            let (lam, s_dir, mut t_dir) = if l0.abs() > l1.abs() { (l0, e0, e1) } else { (l1, e1, e0) };
            let lin = Vector2::new(d, e);
            let (d1, mut d2) = (lin.dot(&s_dir), lin.dot(&t_dir));
            if d2.abs() <= SHAPE_TOL * scale {
                return ConicShape::Degenerate;
            }
            // lam s^2 + d1 s + d2 t + f = 0.
            if -d2 / lam < 0.0 {
                t_dir = -t_dir;
                d2 = -d2;
            }
            let s0 = -d1 / (2.0 * lam);
            let t0 = -(f - d1 * d1 / (4.0 * lam)) / d2;
            return ConicShape::Parabola { vertex: s_dir * s0 + t_dir * t0, axis: t_dir, alpha: -d2 / lam };
        }
        let center = -quad.try_inverse().expect("nonsingular quadratic part") * Vector2::new(d, e) / 2.0;
        let fc = f + (d * center.x + e * center.y) / 2.0;
        let (r0, r1) = (-fc / l0, -fc / l1);
        if disc > 0.0 {
            if r0 <= 0.0 || r1 <= 0.0 {
                return ConicShape::Degenerate;
            }
            let (ax0, ax1) = (r0.sqrt(), r1.sqrt());
            if ax0 >= ax1 {
                ConicShape::Ellipse { center, major: e0, a: ax0, b: ax1 }
            } else {
                ConicShape::Ellipse { center, major: e1, a: ax1, b: ax0 }
            }
        } else if r0 > 0.0 {
            ConicShape::Hyperbola { center, transverse: e0, a: r0.sqrt(), b: (-r1).sqrt() }
        } else {
            ConicShape::Hyperbola { center, transverse: e1, a: r1.sqrt(), b: (-r0).sqrt() }
        }
    }
}

/// Sine of the angle at `a` in the triangle `(a, b, c)`; zero when collinear.
pub fn collinearity(a: &Vector2<f64>, b: &Vector2<f64>, c: &Vector2<f64>) -> f64 {
    let (u, v) = (b - a, c - a);
    let den = u.norm() * v.norm();
    if den == 0.0 {
        0.0
    } else {
        (u.x * v.y - u.y * v.x).abs() / den
    }
}

/// True when some three of the points are collinear.
pub fn has_collinear_triple(pts: &[Vector2<f64>]) -> bool {
    let n = pts.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if collinearity(&pts[i], &pts[j], &pts[k]) <= SHAPE_TOL {
                    return true;
                }
            }
        }
    }
    false
}

/// True when all points are collinear.
pub fn all_collinear(pts: &[Vector2<f64>]) -> bool {
    let far =
        (1..pts.len()).max_by(|i, j| (pts[*i] - pts[0]).norm().total_cmp(&(pts[*j] - pts[0]).norm())).unwrap_or(0);
    pts.iter().all(|p| collinearity(&pts[0], &pts[far], p) <= SHAPE_TOL)
}

/// Ratio of the smallest to the largest singular value of the conic design
/// matrix of six points; zero when they lie on a common conic.
pub fn six_point_conic_defect(pts: &[Vector2<f64>; 6]) -> f64 {
    let mut m = SMatrix::<f64, 6, 6>::zeros();
    for (i, p) in pts.iter().enumerate() {
        m.set_row(i, &SMatrix::<f64, 1, 6>::from_row_slice(&row(p)));
    }
    let s = m.singular_values();
    let max = s.max();
    if max == 0.0 {
        0.0
    } else {
        s.min() / max
    }
}

/// Least-squares plane through `pts`. Returns the motion sending the
/// centroid to the origin and the plane to `z = 0`, and the largest `|z|`.
pub fn plane_frame(pts: &[Point3]) -> (RigidMotion, f64) {
    let n = pts.len() as f64;
    let centroid = pts.iter().sum::<Vector3<f64>>() / n;
    let mut cov = Matrix3::zeros();
    for p in pts {
        let d = p - centroid;
        cov += d * d.transpose();
    }
    let eig = SymmetricEigen::new(cov);
    let k = eig.eigenvalues.imin();
    let normal = eig.eigenvectors.column(k).into_owned().normalize();
    let (u, v) = crate::geom::orthonormal_complement(&normal);
    let rotation = Matrix3::from_rows(&[u.transpose(), v.transpose(), normal.transpose()]);
    let motion = RigidMotion { rotation, translation: -(rotation * centroid) };
    let dev = pts.iter().map(|p| motion.apply(p).z.abs()).fold(0.0, f64::max);
    (motion, dev)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn on_ellipse(a: f64, b: f64, center: Vector2<f64>, rot: f64) -> [Vector2<f64>; 5] {
        let r = nalgebra::Rotation2::new(rot);
        [0.1, 1.3, 2.2, 3.9, 5.0].map(|t: f64| center + r * Vector2::new(a * t.cos(), b * t.sin()))
    }

    #[test]
    fn ellipse_axes_recovered() {
        let pts = on_ellipse(2.0, 1.0, Vector2::new(0.3, -0.2), 0.4);
        let c = Conic::through(&pts);
        for p in &pts {
            assert!(c.eval(p).abs() < 1e-12);
        }
        match c.shape() {
            ConicShape::Ellipse { center, major, a, b } => {
                assert!((a - 2.0).abs() < 1e-10 && (b - 1.0).abs() < 1e-10);
                assert!((center - Vector2::new(0.3, -0.2)).norm() < 1e-10);
                assert!((major.x * 0.4f64.sin() - major.y * 0.4f64.cos()).abs() < 1e-10);
            }
            s => panic!("{s:?}"),
        }
    }

    #[test]
    fn hyperbola_and_parabola() {
        let h = [0.2, -0.7, 1.1, -1.5, 0.5].map(|t: f64| Vector2::new(2.0 * t.cosh(), 0.5 * t.sinh()));
        match Conic::through(&h).shape() {
            ConicShape::Hyperbola { a, b, transverse, .. } => {
                assert!((a - 2.0).abs() < 1e-9 && (b - 0.5).abs() < 1e-9);
                assert!(transverse.y.abs() < 1e-9);
            }
            s => panic!("{s:?}"),
        }
        let p = [-1.0, -0.4, 0.3, 0.9, 1.6].map(|x: f64| Vector2::new(x, x * x / 3.0 + 0.5));
        match Conic::through(&p).shape() {
            ConicShape::Parabola { vertex, axis, alpha } => {
                assert!((alpha - 3.0).abs() < 1e-8);
                assert!((vertex - Vector2::new(0.0, 0.5)).norm() < 1e-8);
                assert!((axis - Vector2::new(0.0, 1.0)).norm() < 1e-8);
            }
            s => panic!("{s:?}"),
        }
    }

    #[test]
    fn line_pair_is_degenerate() {
        let pts = [
            Vector2::new(0.0, 0.0),
            Vector2::new(1.0, 0.0),
            Vector2::new(2.0, 0.0),
            Vector2::new(0.0, 1.0),
            Vector2::new(1.0, 2.0),
        ];
        assert!(has_collinear_triple(&pts));
        assert_eq!(Conic::through(&pts).shape(), ConicShape::Degenerate);
    }

    #[test]
    fn six_points_on_conic() {
        let five = on_ellipse(1.5, 1.0, Vector2::zeros(), 0.0);
        let sixth = Vector2::new(1.5 * 4.4f64.cos(), 4.4f64.sin());
        let mut six = [Vector2::zeros(); 6];
        six[..5].copy_from_slice(&five);
        six[5] = sixth;
        assert!(six_point_conic_defect(&six) < 1e-12);
        six[5] = Vector2::new(0.1, 0.2);
        assert!(six_point_conic_defect(&six) > 1e-3);
    }

    #[test]
    fn plane_frame_flattens() {
        let m = RigidMotion {
            rotation: *nalgebra::Rotation3::from_euler_angles(0.3, -0.5, 1.0).matrix(),
            translation: Vector3::new(1.0, 2.0, 3.0),
        };
        let pts: Vec<Point3> = (0..5).map(|i| m.apply(&Vector3::new(i as f64, (i * i) as f64 * 0.3, 0.0))).collect();
        let (_, dev) = plane_frame(&pts);
        assert!(dev < 1e-12);
    }
}
