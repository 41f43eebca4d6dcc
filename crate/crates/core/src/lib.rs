//! Exact minimal-sample fitting of cylinders and cones.

pub mod cone;
pub mod conic;
pub mod cylinder;
pub mod error;
pub mod geom;
pub mod kind;
pub mod oracle;
pub mod poly;
pub mod refine;
pub mod synth;
pub mod tol;

pub use error::{FitError, Result};
pub use geom::*;
pub use kind::{primitive_distance, SolverKind};
