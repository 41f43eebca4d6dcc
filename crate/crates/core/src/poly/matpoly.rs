use nalgebra::DMatrix;

use super::bipoly::{BiPoly, Var};
use super::unipoly::UniPoly;
use crate::error::{FitError, Result};

/// Matrix polynomial `M_0 + M_1 x + ... + M_d x^d` with square coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MatPoly {
    pub coeffs: Vec<DMatrix<f64>>,
}

impl MatPoly {
    pub fn new(coeffs: Vec<DMatrix<f64>>) -> Result<Self> {
        let k = coeffs.first().map(|m| m.nrows()).ok_or(FitError::NotAPolynomialMatrix)?;
        if coeffs.iter().any(|m| m.nrows() != k || m.ncols() != k) {
            return Err(FitError::NotAPolynomialMatrix);
        }
        Ok(MatPoly { coeffs })
    }

    pub fn size(&self) -> usize {
        self.coeffs[0].nrows()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> DMatrix<f64> {
        let k = self.size();
        self.coeffs.iter().rev().fold(DMatrix::zeros(k, k), |acc, m| acc * x + m)
    }

    pub fn transpose(&self) -> Self {
        MatPoly { coeffs: self.coeffs.iter().map(|m| m.transpose()).collect() }
    }

    /// Removes trailing zero coefficient matrices.
    fn trim(mut self) -> Self {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(|m| m.amax() == 0.0) {
            self.coeffs.pop();
        }
        self
    }
}

/// Generalized eigenproblem `(A - lambda B) x = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pencil {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

impl Pencil {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<Self> {
        if !a.is_square() || a.shape() != b.shape() {
            return Err(FitError::NotAPolynomialMatrix);
        }
        Ok(Pencil { a, b })
    }

    pub fn size(&self) -> usize {
        self.a.nrows()
    }
}

/// Sylvester matrix of `f` and `g` seen as univariate in `eliminated`.
///
/// With `p = deg f` and `q = deg g` in the eliminated variable `x`, the
/// first `q` rows hold shifted copies of the coefficients of `f` in
/// descending powers, the last `p` rows those of `g`. Hence
/// `S * (x^(p+q-1), ..., x, 1)^T = 0` at every common root. Entries are
/// polynomials in the kept variable, returned as a [`MatPoly`].
pub fn sylvester(f: &BiPoly, g: &BiPoly, eliminated: Var) -> Result<MatPoly> {
    if f.is_zero() || g.is_zero() {
        return Err(FitError::ZeroInput);
    }
    let fc = f.coeffs_in(eliminated);
    let gc = g.coeffs_in(eliminated);
    let (p, q) = (fc.len() - 1, gc.len() - 1);
    if p + q == 0 {
        return Err(FitError::NotAPolynomialMatrix);
    }
    let n = p + q;
    let mut entries = vec![vec![UniPoly::zero(); n]; n];
    for i in 0..q {
        for (k, c) in fc.iter().enumerate() {
            entries[i][i + p - k] = c.clone();
        }
    }
    for i in 0..p {
        for (k, c) in gc.iter().enumerate() {
            entries[q + i][i + q - k] = c.clone();
        }
    }
    let d = entries.iter().flatten().filter_map(|e| e.degree()).max().unwrap_or(0);
    let coeffs = (0..=d).map(|j| DMatrix::from_fn(n, n, |r, c| entries[r][c].coeff(j))).collect();
    Ok(MatPoly { coeffs })
}

/// Companion linearization of a matrix polynomial of degree `d >= 1`.
///
/// For `d = 2` this is `A = [[0, I], [M0^T, M1^T]]`, `B = [[I, 0], [0, -M2^T]]`;
/// in general the superdiagonal identity blocks shift the powers and the last
/// block row carries `M_0^T .. M_{d-1}^T`. Then `mp(lambda)^T v = 0` iff
/// `(A - lambda B) (v, lambda v, ..., lambda^(d-1) v) = 0`.
pub fn linearize(mp: &MatPoly) -> Result<Pencil> {
    let mp = mp.clone().trim();
    let d = mp.degree();
    if d == 0 {
        return Err(FitError::NotAPolynomialMatrix);
    }
    let k = mp.size();
    let n = k * d;
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DMatrix::<f64>::zeros(n, n);
    for blk in 0..d - 1 {
        a.view_mut((blk * k, (blk + 1) * k), (k, k)).fill_with_identity();
        b.view_mut((blk * k, blk * k), (k, k)).fill_with_identity();
    }
    for j in 0..d {
        a.view_mut(((d - 1) * k, j * k), (k, k)).copy_from(&mp.coeffs[j].transpose());
    }
    b.view_mut(((d - 1) * k, (d - 1) * k), (k, k)).copy_from(&(-mp.coeffs[d].transpose()));
    Ok(Pencil { a, b })
}
