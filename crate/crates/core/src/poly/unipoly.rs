use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{FitError, Result};

/// Tolerance on imaginary parts, relative to `1 + |re|`.
pub const IM_TOL: f64 = 1e-7;

/// Dense univariate polynomial, coefficients in ascending degree.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct UniPoly {
    pub coeffs: Vec<f64>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        roots.iter().fold(Self::constant(1.0), |acc, r| acc.mul(&Self::new(vec![-r, 1.0])))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn norm1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    /// Drops leading coefficients below `rel * max|c|`.
    pub fn trimmed(&self, rel: f64) -> Self {
        let big = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let mut c = self.coeffs.clone();
        while c.last().is_some_and(|x| x.abs() <= rel * big) {
            c.pop();
        }
        Self::new(c)
    }
}

/// Real roots, with multiplicity, sorted ascending.
///
/// Companion-matrix eigenvalues, imaginary filter, then one Newton step.
pub fn real_roots(p: &UniPoly) -> Result<Vec<f64>> {
    let p = p.trimmed(1e-14);
    let deg = match p.degree() {
        None => return Err(FitError::ZeroInput),
        Some(0) => return Err(FitError::ZeroInput),
        Some(d) => d,
    };
    // Exact zero roots are split off so they are reported exactly.
    let zeros = p.coeffs.iter().take_while(|c| **c == 0.0).count();
    let reduced = UniPoly::new(p.coeffs[zeros..].to_vec());
    let mut roots = vec![0.0; zeros];
    let rdeg = deg - zeros;
    if rdeg == 1 {
        roots.push(-reduced.coeffs[0] / reduced.coeffs[1]);
    } else if rdeg > 1 {
        let lead = reduced.coeffs[rdeg];
        let mut comp = DMatrix::<f64>::zeros(rdeg, rdeg);
        for i in 1..rdeg {
            comp[(i, i - 1)] = 1.0;
        }
        for i in 0..rdeg {
            comp[(i, rdeg - 1)] = -reduced.coeffs[i] / lead;
        }
        let dp = reduced.derivative();
        for z in comp.complex_eigenvalues().iter() {
            if z.im.abs() > IM_TOL * (1.0 + z.re.abs()) {
                continue;
            }
            let mut x = z.re;
            let d = dp.eval(x);
            if d != 0.0 {
                let step = reduced.eval(x) / d;
                // Guard against Newton jumping away near multiple roots.
                if step.is_finite() && step.abs() <= 1e-3 * (1.0 + x.abs()) {
                    let cand = x - step;
                    if reduced.eval(cand).abs() <= reduced.eval(x).abs() {
                        x = cand;
                    }
                }
            }
            roots.push(x);
        }
    }
    roots.sort_by(|a, b| a.total_cmp(b));
    Ok(roots)
}

/// Collapses roots closer than `tol` (relative to `1 + |x|`).
pub fn dedup_sorted(roots: &mut Vec<f64>, tol: f64) {
    roots.dedup_by(|b, a| (*b - *a).abs() <= tol * (1.0 + a.abs()));
}
