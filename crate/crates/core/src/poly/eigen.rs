use faer::diag::Diag;
use faer::dyn_stack::{MemBuffer, MemStack, StackReq};
use faer::linalg::evd::ComputeEigenvectors;
use faer::linalg::gevd;
use faer::{Mat, Par};
use nalgebra::{Complex, DVector};

use super::matpoly::Pencil;
use crate::error::{FitError, Result};

/// Relative size of `|beta|` below which an eigenvalue is treated as infinite.
pub const INFINITE_TOL: f64 = 1e-10;
/// Both `|alpha|` and `|beta|` below this (relative) flag a singular pencil.
const SINGULAR_TOL: f64 = 1e-13;

/// One generalized eigenpair of a [`Pencil`].
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSolution {
    /// `alpha / beta`; meaningless when `finite` is false.
    pub eigenvalue: Complex<f64>,
    /// Right eigenvector, unit 2-norm.
    pub eigenvector: DVector<Complex<f64>>,
    pub finite: bool,
}

/// All generalized eigenpairs of `(A, B)`, by the QZ algorithm.
pub fn pencil_eigen(p: &Pencil) -> Result<Vec<EigenSolution>> {
    let n = p.size();
    if n == 0 {
        return Ok(Vec::new());
    }
    if p.a.iter().chain(p.b.iter()).any(|x| !x.is_finite()) {
        return Err(FitError::NonFinite);
    }
    let na = p.a.norm().max(1e-300);
    let nb = p.b.norm();
    if p.a.norm() == 0.0 && nb == 0.0 {
        return Err(FitError::SingularPencil);
    }
    let mut a = Mat::<f64>::from_fn(n, n, |i, j| p.a[(i, j)]);
    let mut b = Mat::<f64>::from_fn(n, n, |i, j| p.b[(i, j)]);
    let mut u = Mat::<f64>::zeros(n, n);
    let mut s_re = Diag::<f64>::zeros(n);
    let mut s_im = Diag::<f64>::zeros(n);
    let mut s_b = Diag::<f64>::zeros(n);
    // The scratch estimate of the high-level wrapper is too small for the
    // eigenvector back-substitution on tiny complex pairs; pad it.
    let req = StackReq::all_of(&[
        gevd::gevd_scratch::<f64>(n, ComputeEigenvectors::No, ComputeEigenvectors::Yes, Par::Seq, Default::default()),
        faer::linalg::temp_mat_scratch::<f64>(n, 2 * n + 4),
        faer::linalg::temp_mat_scratch::<f64>(n, 2 * n + 4),
    ]);
    let mut buf = MemBuffer::new(req);
    gevd::gevd_real(
        a.as_mut(),
        b.as_mut(),
        s_re.as_mut(),
        s_im.as_mut(),
        s_b.as_mut(),
        None,
        Some(u.as_mut()),
        Par::Seq,
        MemStack::new(&mut buf),
        Default::default(),
    )
    .map_err(|e| FitError::Eigen(format!("{e:?}")))?;
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        // Complex pairs occupy two consecutive columns (re, im).
        let pair = s_im[i] != 0.0 && i + 1 < n;
        let cols: Vec<(f64, DVector<Complex<f64>>)> = if pair {
            let re = DVector::from_fn(n, |r, _| u[(r, i)]);
            let im = DVector::from_fn(n, |r, _| u[(r, i + 1)]);
            vec![(s_im[i], re.zip_map(&im, Complex::new)), (-s_im[i], re.zip_map(&im, |x, y| Complex::new(x, -y)))]
        } else {
            vec![(0.0, DVector::from_fn(n, |r, _| Complex::new(u[(r, i)], 0.0)))]
        };
        for (im, mut v) in cols {
            let alpha = Complex::new(s_re[i], im);
            let beta = Complex::new(s_b[i], 0.0);
            let ra = alpha.norm() / na;
            let rb = if nb > 0.0 { beta.norm() / nb } else { 0.0 };
            let size = ra.max(rb);
            if size <= SINGULAR_TOL {
                return Err(FitError::SingularPencil);
            }
            let finite = rb > INFINITE_TOL * size;
            let eigenvalue = if finite { alpha / beta } else { Complex::new(f64::INFINITY, 0.0) };
            let norm = v.norm();
            if norm > 0.0 {
                v.unscale_mut(norm);
            }
            out.push(EigenSolution { eigenvalue, eigenvector: v, finite });
        }
        i += if pair { 2 } else { 1 };
    }
    Ok(out)
}
