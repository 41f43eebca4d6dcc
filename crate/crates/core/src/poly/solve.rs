use nalgebra::{Matrix2, Vector2};

use super::bipoly::{BiPoly, Var};
use super::eigen::pencil_eigen;
use super::matpoly::{linearize, sylvester};
use super::unipoly::{real_roots, UniPoly, IM_TOL};
use crate::error::{FitError, Result};

/// Distance below which two roots are merged.
pub const DEDUP_TOL: f64 = 1e-6;
/// Relative discriminant size treated as a double root.
pub const DOUBLE_ROOT_TOL: f64 = 1e-10;

/// A real root `(l, m)` of a binary quadratic form, unit length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HomRoot {
    pub l: f64,
    pub m: f64,
    pub multiplicity: u8,
}

fn hom_root(l: f64, m: f64, multiplicity: u8) -> HomRoot {
    let r = l.hypot(m);
    HomRoot { l: l / r, m: m / r, multiplicity }
}

/// Real roots of `a l^2 + b l m + c m^2`, classified by `b^2 - 4ac`.
pub fn quad_homogeneous_roots(a: f64, b: f64, c: f64) -> Result<Vec<HomRoot>> {
    if a == 0.0 && b == 0.0 && c == 0.0 {
        return Err(FitError::DegenerateQuadratic);
    }
    let delta = b * b - 4.0 * a * c;
    let double = delta.abs() <= DOUBLE_ROOT_TOL * (b * b).max((4.0 * a * c).abs());
    if a == 0.0 {
        // m (b l + c m) = 0.
        return Ok(if b == 0.0 {
            vec![hom_root(1.0, 0.0, 2)]
        } else {
            vec![hom_root(1.0, 0.0, 1), hom_root(-c, b, 1)]
        });
    }
    if c == 0.0 {
        // l (a l + b m) = 0.
        return Ok(if b == 0.0 {
            vec![hom_root(0.0, 1.0, 2)]
        } else {
            vec![hom_root(0.0, 1.0, 1), hom_root(-b, a, 1)]
        });
    }
    if double {
        return Ok(vec![hom_root(-b, 2.0 * a, 2)]);
    }
    if delta < 0.0 {
        return Ok(Vec::new());
    }
    // Roots of a t^2 + b t + c with t = l / m, cancellation-free.
    let q = -0.5 * (b + b.signum() * delta.sqrt());
    let q = if q == 0.0 { -0.5 * delta.sqrt() } else { q };
    Ok(vec![hom_root(q / a, 1.0, 1), hom_root(c / q, 1.0, 1)])
}

/// Residual tolerance for a root `x` of `f`.
pub fn res_tol(f: &BiPoly, x: (f64, f64)) -> f64 {
    let r = x.0.hypot(x.1);
    1e-7 * (1.0 + f.norm1()) * (1.0 + r).powi(f.total_degree() as i32)
}

fn accepts(f: &BiPoly, g: &BiPoly, x: (f64, f64)) -> bool {
    x.0.is_finite()
        && x.1.is_finite()
        && f.eval2(x.0, x.1).abs() <= res_tol(f, x)
        && g.eval2(x.0, x.1).abs() <= res_tol(g, x)
}

fn badness(f: &BiPoly, g: &BiPoly, x: (f64, f64)) -> f64 {
    (f.eval2(x.0, x.1).abs() / res_tol(f, x)).max(g.eval2(x.0, x.1).abs() / res_tol(g, x))
}

/// A few Newton steps on the square system; keeps the best iterate.
fn newton_polish(f: &BiPoly, g: &BiPoly, x: (f64, f64)) -> (f64, f64) {
    let (fu, fv, gu, gv) = (f.partial(0), f.partial(1), g.partial(0), g.partial(1));
    let mut best = x;
    let mut best_bad = badness(f, g, x);
    let mut cur = x;
    for _ in 0..6 {
        let j = Matrix2::new(
            fu.eval2(cur.0, cur.1),
            fv.eval2(cur.0, cur.1),
            gu.eval2(cur.0, cur.1),
            gv.eval2(cur.0, cur.1),
        );
        let r = Vector2::new(f.eval2(cur.0, cur.1), g.eval2(cur.0, cur.1));
        let Some(step) = j.lu().solve(&r) else { break };
        let next = (cur.0 - step.x, cur.1 - step.y);
        if !(next.0.is_finite() && next.1.is_finite()) {
            break;
        }
        let bad = badness(f, g, next);
        cur = next;
        if bad < best_bad {
            best = next;
            best_bad = bad;
        }
        if step.norm() <= 1e-15 * (1.0 + cur.0.hypot(cur.1)) {
            break;
        }
    }
    best
}

fn point(kept: Var, k: f64, e: f64) -> (f64, f64) {
    match kept {
        Var::U => (k, e),
        Var::V => (e, k),
    }
}

/// Roots of `f` in the eliminated variable once the kept one is fixed,
/// filtered against `g`.
fn slice_roots(f: &BiPoly, g: &BiPoly, kept: Var, k: f64) -> Vec<(f64, f64)> {
    let elim = kept.other();
    let mut out = Vec::new();
    let mut slices: Vec<UniPoly> = [f, g].iter().map(|p| p.partial_eval(kept, k).trimmed(1e-13)).collect();
    slices.sort_by_key(|s| s.degree().map_or(usize::MAX, |d| if d == 0 { usize::MAX } else { d }));
    for s in &slices {
        if let Ok(roots) = real_roots(s) {
            for e in roots {
                let x = newton_polish(f, g, point(kept, k, e));
                if accepts(f, g, x) {
                    out.push(x);
                }
            }
            break;
        }
    }
    let _ = elim;
    out
}

/// Solves the system when one polynomial does not involve `elim`.
fn solve_triangular(lone: &BiPoly, other: &BiPoly, elim: Var) -> Result<Vec<(f64, f64)>> {
    let kept = elim.other();
    let uni = lone.partial_eval(elim, 0.0);
    let mut out = Vec::new();
    for k in real_roots(&uni.trimmed(1e-14))? {
        out.extend(slice_roots(other, lone, kept, k));
    }
    Ok(out)
}

/// Real common roots of `f` and `g` by the hidden-variable resultant method.
///
/// The variable with the larger total degree across both polynomials is
/// eliminated (ties eliminate `v`). Sylvester matrix, companion pencil and
/// QZ give the kept coordinate as eigenvalues and the eliminated one from
/// the Vandermonde structure of the eigenvectors. Candidates are polished by
/// Newton steps, verified against both polynomials, deduplicated and sorted.
pub fn bivariate_solve(f: &BiPoly, g: &BiPoly) -> Result<Vec<(f64, f64)>> {
    if f.is_zero() || g.is_zero() {
        return Err(FitError::ZeroInput);
    }
    let f = &f.scale(1.0 / f.max_abs_coeff());
    let g = &g.scale(1.0 / g.max_abs_coeff());
    let du = f.deg(Var::U) + g.deg(Var::U);
    let dv = f.deg(Var::V) + g.deg(Var::V);
    let elim = if du > dv { Var::U } else { Var::V };
    let kept = elim.other();

    let mut sols = if f.deg(elim) == 0 || g.deg(elim) == 0 {
        if f.deg(elim) == 0 && g.deg(elim) == 0 {
            return Err(FitError::SingularPencil);
        }
        let (lone, other) = if f.deg(elim) == 0 { (f, g) } else { (g, f) };
        if lone.deg(kept) == 0 {
            // Nonzero constant: no roots.
            return Ok(Vec::new());
        }
        solve_triangular(lone, other, elim)?
    } else {
        let s = sylvester(f, g, elim)?;
        let n = s.size();
        let pencil = linearize(&s.transpose())?;
        let mut out = Vec::new();
        for e in pencil_eigen(&pencil)? {
            if !e.finite || e.eigenvalue.im.abs() > IM_TOL * (1.0 + e.eigenvalue.re.abs()) {
                continue;
            }
            let k = e.eigenvalue.re;
            let w = &e.eigenvector;
            let d = w.len() / n;
            let blk = (0..d)
                .max_by(|a, b| {
                    let na = w.rows(a * n, n).norm();
                    let nb = w.rows(b * n, n).norm();
                    na.total_cmp(&nb)
                })
                .unwrap_or(0);
            let v = w.rows(blk * n, n);
            let vmax = v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
            let (mut sum, mut cnt) = (0.0, 0usize);
            for i in 0..n - 1 {
                if v[i + 1].norm() > 0.1 * vmax {
                    sum += (v[i] / v[i + 1]).re;
                    cnt += 1;
                }
            }
            let mut found = false;
            if cnt > 0 {
                let x = newton_polish(f, g, point(kept, k, sum / cnt as f64));
                if accepts(f, g, x) {
                    out.push(x);
                    found = true;
                }
            }
            if !found {
                out.extend(slice_roots(f, g, kept, k));
            }
        }
        out
    };
    sols.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut uniq: Vec<(f64, f64)> = Vec::with_capacity(sols.len());
    for s in sols {
        let dup = uniq.iter().any(|t| (s.0 - t.0).hypot(s.1 - t.1) <= DEDUP_TOL * (1.0 + s.0.hypot(s.1)));
        if !dup {
            uniq.push(s);
        }
    }
    Ok(uniq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn close(a: (f64, f64), b: (f64, f64), tol: f64) -> bool {
        (a.0 - b.0).abs() <= tol && (a.1 - b.1).abs() <= tol
    }

    #[test]
    fn quad_examples() {
        let r = quad_homogeneous_roots(1.0, 0.0, -1.0).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|h| (h.l.abs() - FRAC_1_SQRT_2).abs() < 1e-15));
        assert!(r.iter().any(|h| h.l * h.m > 0.0) && r.iter().any(|h| h.l * h.m < 0.0));
        assert!(quad_homogeneous_roots(1.0, 0.0, 1.0).unwrap().is_empty());
        let r = quad_homogeneous_roots(0.0, 1.0, 1.0).unwrap();
        assert_eq!((r[0].l, r[0].m), (1.0, 0.0));
        assert!((r[1].l + FRAC_1_SQRT_2).abs() < 1e-15 && (r[1].m - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(quad_homogeneous_roots(0.0, 0.0, 0.0), Err(FitError::DegenerateQuadratic));
        let r = quad_homogeneous_roots(1.0, 2.0, 1.0).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 2);
    }

    #[test]
    fn quad_matches_scalar_pencil() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let (a, b, c) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let closed = quad_homogeneous_roots(a, b, c).unwrap();
            let mp = super::super::matpoly::MatPoly::new(vec![
                nalgebra::DMatrix::from_element(1, 1, c),
                nalgebra::DMatrix::from_element(1, 1, b),
                nalgebra::DMatrix::from_element(1, 1, a),
            ])
            .unwrap();
            let mut ev: Vec<f64> = pencil_eigen(&linearize(&mp).unwrap())
                .unwrap()
                .iter()
                .filter(|e| e.finite && e.eigenvalue.im.abs() < 1e-12)
                .map(|e| e.eigenvalue.re)
                .collect();
            ev.sort_by(|x, y| x.total_cmp(y));
            let mut ts: Vec<f64> = closed.iter().map(|h| h.l / h.m).collect();
            ts.sort_by(|x, y| x.total_cmp(y));
            assert_eq!(ev.len(), ts.len());
            for (x, y) in ev.iter().zip(&ts) {
                assert!((x - y).abs() < 1e-12 * (1.0 + y.abs()), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn circle_and_line() {
        let u = BiPoly::u();
        let v = BiPoly::v();
        let f = &(&(&u * &u) + &(&v * &v)) - &BiPoly::constant(1.0);
        let g = &u - &v;
        let r = bivariate_solve(&f, &g).unwrap();
        assert_eq!(r.len(), 2);
        assert!(close(r[0], (-FRAC_1_SQRT_2, -FRAC_1_SQRT_2), 1e-12));
        assert!(close(r[1], (FRAC_1_SQRT_2, FRAC_1_SQRT_2), 1e-12));
    }

    #[test]
    fn four_corners() {
        let u = BiPoly::u();
        let v = BiPoly::v();
        let one = BiPoly::constant(1.0);
        let r = bivariate_solve(&(&(&u * &u) - &one), &(&(&v * &v) - &one)).unwrap();
        assert_eq!(r.len(), 4);
        for (x, y) in r {
            assert!((x.abs() - 1.0).abs() < 1e-12 && (y.abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn shared_eigenvalue_distinct_roots() {
        // u = 0 carries two solutions v = +-2, so the eigenvalue is double.
        let u = BiPoly::u();
        let v = BiPoly::v();
        let f = &(&(&v * &v) - &BiPoly::constant(4.0)) + &(&u * &v);
        let g = &(&(&v * &v) - &BiPoly::constant(4.0)) + &(&u * &u);
        let r = bivariate_solve(&f, &g).unwrap();
        assert!(r.iter().any(|x| close(*x, (0.0, 2.0), 1e-9)));
        assert!(r.iter().any(|x| close(*x, (0.0, -2.0), 1e-9)));
        for x in &r {
            assert!(accepts(&f, &g, *x));
        }
    }

    #[test]
    fn planted_roots_random_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..50 {
            let root = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let mut f = BiPoly::zero();
            let mut g = BiPoly::zero();
            for i in 0..=3 {
                for j in 0..=(3 - i) {
                    f.add_term([i, j], rng.random_range(-1.0..1.0));
                }
            }
            for i in 0..=2 {
                for j in 0..=(2 - i) {
                    g.add_term([i, j], rng.random_range(-1.0..1.0));
                }
            }
            f.add_term([0, 0], -f.eval2(root.0, root.1));
            g.add_term([0, 0], -g.eval2(root.0, root.1));
            let r = bivariate_solve(&f, &g).unwrap();
            assert!(r.len() <= 6);
            assert!(r.iter().any(|x| close(*x, root, 1e-7)), "missing {root:?} in {r:?}");
            for x in &r {
                assert!(accepts(&f, &g, *x));
            }
        }
    }

    #[test]
    fn output_is_sorted() {
        let u = BiPoly::u();
        let v = BiPoly::v();
        let one = BiPoly::constant(1.0);
        let f = &(&(&u * &u) + &(&v * &v)) - &BiPoly::constant(4.0);
        let g = &(&u * &v) - &one;
        let r = bivariate_solve(&f, &g).unwrap();
        assert_eq!(r.len(), 4);
        assert!(r.windows(2).all(|w| w[0].0 <= w[1].0));
    }
}
