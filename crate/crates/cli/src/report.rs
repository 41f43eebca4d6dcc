//! JSON documents written by `minfit fit`.

use std::time::Duration;

use minfit::{normal_deviation, OrientedPoint, Primitive, SolutionSet, SolverKind, Surface};
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "minfit/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// Positional residual at each input point.
    pub position: Vec<f64>,
    /// Normal deviation (radians) at each oriented input point.
    pub normal: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub schema: String,
    pub kind: SolverKind,
    pub solution: SolutionSet<Primitive>,
    /// One entry per primitive, in the same order.
    pub residuals: Vec<Residuals>,
    pub wall_time_ms: f64,
}

pub fn residuals(prim: &Primitive, pts: &[OrientedPoint]) -> Residuals {
    let position = pts.iter().map(|op| prim.residual(&op.p).unwrap_or(f64::INFINITY)).collect();
    let normal =
        pts.iter().filter(|op| op.n.is_some()).map(|op| normal_deviation(prim, op).unwrap_or(f64::INFINITY)).collect();
    Residuals { position, normal }
}

impl FitReport {
    pub fn new(kind: SolverKind, solution: SolutionSet<Primitive>, pts: &[OrientedPoint], elapsed: Duration) -> Self {
        let residuals = solution.primitives.iter().map(|p| residuals(p, pts)).collect();
        FitReport { schema: SCHEMA.to_string(), kind, solution, residuals, wall_time_ms: elapsed.as_secs_f64() * 1e3 }
    }
}
