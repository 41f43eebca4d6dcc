//! Brute-force verifiers, independent of the algebraic solvers.

use nalgebra::{Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{FitError, Result};
use crate::geom::{normal_deviation, orthonormal_complement, Dir3, OrientedPoint, Point3, Primitive, Surface};
use crate::poly::BiPoly;

/// Sampling density for the grid searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Samples per dimension.
    pub resolution: usize,
    /// Newton steps from the center of each flagged cell.
    pub refine_iters: usize,
}

impl GridSpec {
    pub fn new(resolution: usize, refine_iters: usize) -> Result<Self> {
        if resolution < 64 || refine_iters == 0 {
            return Err(FitError::InvalidPrimitive("grid resolution must be at least 64"));
        }
        Ok(GridSpec { resolution, refine_iters })
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { resolution: 256, refine_iters: 30 }
    }
}

#[derive(Clone, Copy, Debug)]
struct Rect {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

impl Rect {
    fn center(&self) -> (f64, f64) {
        ((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)
    }

    /// The rectangle grown by `k` times its size on every side.
    fn contains_grown(&self, p: (f64, f64), k: f64) -> bool {
        let (wx, wy) = ((self.x1 - self.x0) * k, (self.y1 - self.y0) * k);
        p.0 >= self.x0 - wx && p.0 <= self.x1 + wx && p.1 >= self.y0 - wy && p.1 <= self.y1 + wy
    }
}

fn changes(v: [f64; 4]) -> bool {
    let pos = v.iter().any(|x| *x >= 0.0);
    let neg = v.iter().any(|x| *x <= 0.0);
    pos && neg
}

/// Newton iteration on `f = (0, 0)` with a central-difference Jacobian.
/// Returns the final point and residual norm.
fn newton2(f: &impl Fn(f64, f64) -> (f64, f64), start: (f64, f64), iters: usize) -> ((f64, f64), f64) {
    let (mut x, mut y) = start;
    let norm = |v: (f64, f64)| v.0.hypot(v.1);
    let mut val = f(x, y);
    for _ in 0..iters {
        if norm(val) == 0.0 {
            break;
        }
        let (hx, hy) = (1e-7 * (1.0 + x.abs()), 1e-7 * (1.0 + y.abs()));
        let (a, b) = (f(x + hx, y), f(x - hx, y));
        let (c, d) = (f(x, y + hy), f(x, y - hy));
        let (j11, j21) = ((a.0 - b.0) / (2.0 * hx), (a.1 - b.1) / (2.0 * hx));
        let (j12, j22) = ((c.0 - d.0) / (2.0 * hy), (c.1 - d.1) / (2.0 * hy));
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dx = (j22 * val.0 - j12 * val.1) / det;
        let dy = (j11 * val.1 - j21 * val.0) / det;
        let (nx, ny) = (x - dx, y - dy);
        let nval = f(nx, ny);
        if !(norm(nval) < norm(val)) {
            break;
        }
        (x, y, val) = (nx, ny, nval);
    }
    ((x, y), norm(val))
}

/// Common zeros of both components of `f`: every grid cell where both
/// change sign seeds a Newton solve, kept when it converges (residual at
/// most `accept`) near its cell. Roots closer than `merge` are merged.
fn common_sign_cells(
    f: impl Fn(f64, f64) -> (f64, f64),
    window: Rect,
    grid: GridSpec,
    merge: f64,
    accept: impl Fn((f64, f64), f64) -> bool,
) -> Vec<(f64, f64)> {
    let n = grid.resolution;
    let (dx, dy) = ((window.x1 - window.x0) / n as f64, (window.y1 - window.y0) / n as f64);
    let xs: Vec<f64> = (0..=n).map(|i| window.x0 + dx * i as f64).collect();
    let ys: Vec<f64> = (0..=n).map(|j| window.y0 + dy * j as f64).collect();
    let vals: Vec<Vec<(f64, f64)>> = xs.iter().map(|&x| ys.iter().map(|&y| f(x, y)).collect()).collect();
    let mut out: Vec<(f64, f64)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let c = [vals[i][j], vals[i + 1][j], vals[i][j + 1], vals[i + 1][j + 1]];
            if !(changes(c.map(|x| x.0)) && changes(c.map(|x| x.1))) {
                continue;
            }
            let cell = Rect { x0: xs[i], y0: ys[j], x1: xs[i + 1], y1: ys[j + 1] };
            let (p, res) = newton2(&f, cell.center(), grid.refine_iters);
            if !cell.contains_grown(p, 1.0) || !accept(p, res) {
                continue;
            }
            if !out.iter().any(|q| (q.0 - p.0).hypot(q.1 - p.1) <= merge) {
                out.push(p);
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    out
}

/// Cocyclicity determinant of four points projected along `t`.
fn projected_cocyclic(t: &Vector3<f64>, q: [&Point3; 4]) -> f64 {
    let (e1, e2) = orthonormal_complement(t);
    let mut m = Matrix4::zeros();
    for (i, p) in q.iter().enumerate() {
        let (x, y) = (p.dot(&e1), p.dot(&e2));
        m.set_column(i, &Vector4::new(1.0, x, y, x * x + y * y));
    }
    m.determinant()
}

fn hemisphere(theta: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
}

/// Axis directions of cylinders through five points, by sign changes of
/// the two cocyclicity determinants over a hemisphere grid. Chord
/// directions of the first three points, where both vanish trivially, are
/// dropped.
pub fn cylinder_direction_oracle(points: &[Point3; 5], grid: GridSpec) -> Vec<Dir3> {
    let c = points.iter().sum::<Vector3<f64>>() / 5.0;
    let diag = points.iter().map(|p| (p - c).norm()).fold(0.0, f64::max).max(1e-300);
    let q: Vec<Point3> = points.iter().map(|p| (p - c) / diag).collect();
    let f = |theta: f64, phi: f64| {
        let t = hemisphere(theta, phi);
        (projected_cocyclic(&t, [&q[0], &q[1], &q[2], &q[3]]), projected_cocyclic(&t, [&q[0], &q[1], &q[2], &q[4]]))
    };
    let window = Rect { x0: 0.0, y0: 0.0, x1: std::f64::consts::FRAC_PI_2, y1: std::f64::consts::TAU };
    let chords: Vec<Dir3> = [(0, 1), (0, 2), (1, 2)].iter().filter_map(|&(i, j)| Dir3::new(q[j] - q[i]).ok()).collect();
    let mut out: Vec<Dir3> = Vec::new();
    for (theta, phi) in common_sign_cells(f, window, grid, 1e-6, |_, res| res <= 1e-12) {
        let Ok(d) = Dir3::new(hemisphere(theta, phi)) else { continue };
        let d = d.sign_normalized();
        if chords.iter().any(|c| c.line_angle(&d) < 1e-3) {
            continue;
        }
        // The third quadruple rules out cells where the two curves only
        // pass near each other.
        let g = projected_cocyclic(d.as_vec(), [&q[0], &q[1], &q[3], &q[4]]);
        if g.abs() > 1e-6 {
            continue;
        }
        if !out.iter().any(|o| o.line_angle(&d) < 1e-5) {
            out.push(d);
        }
    }
    out
}

/// Common real zeros of `f` and `g` inside `window = (u0, v0, u1, v1)`.
pub fn bivariate_sign_grid(f: &BiPoly, g: &BiPoly, window: (f64, f64, f64, f64), grid: GridSpec) -> Vec<(f64, f64)> {
    let (fs, gs) = (f.max_abs_coeff().max(1e-300), g.max_abs_coeff().max(1e-300));
    let eval = |u: f64, v: f64| (f.eval2(u, v) / fs, g.eval2(u, v) / gs);
    let rect = Rect { x0: window.0, y0: window.1, x1: window.2, y1: window.3 };
    let degree = f.total_degree().max(g.total_degree()) as i32;
    let tol = 1e-6 * (1.0 + (window.2 - window.0).abs());
    common_sign_cells(eval, rect, grid, tol, |(u, v), res| res <= 1e-10 * (1.0 + u.abs() + v.abs()).powi(degree))
}

pub const DEFAULT_WINDOW: (f64, f64, f64, f64) = (-50.0, -50.0, 50.0, 50.0);

/// Largest residuals of a primitive over a sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    pub max_position: f64,
    pub max_normal: f64,
}

pub fn surface_membership(
    primitive: &Primitive,
    points: &[OrientedPoint],
    oriented_tol: f64,
    pos_tol: f64,
) -> Membership {
    let mut max_position = 0.0f64;
    let mut max_normal = 0.0f64;
    for op in points {
        let r = primitive.residual(&op.p).unwrap_or(f64::INFINITY);
        max_position = max_position.max(r);
        if op.n.is_some() {
            let d = normal_deviation(primitive, op).unwrap_or(f64::INFINITY);
            max_normal = max_normal.max(d);
        }
    }
    Membership { member: max_position <= pos_tol && max_normal <= oriented_tol, max_position, max_normal }
}
