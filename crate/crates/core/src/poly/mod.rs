//! Small dense polynomial-system engine.

mod bipoly;
mod eigen;
mod matpoly;
mod solve;
mod unipoly;

pub use bipoly::{BiPoly, SparsePoly, TriPoly, Var};
pub use eigen::{pencil_eigen, EigenSolution, INFINITE_TOL};
pub use matpoly::{linearize, sylvester, MatPoly, Pencil};
pub use solve::{bivariate_solve, quad_homogeneous_roots, res_tol, HomRoot, DEDUP_TOL, DOUBLE_ROOT_TOL};
pub use unipoly::{dedup_sorted, real_roots, UniPoly, IM_TOL};
