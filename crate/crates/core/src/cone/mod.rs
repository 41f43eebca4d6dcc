//! Cones through point and normal data.

mod coplanar;
mod one_oriented;
mod six_points;
mod two_oriented;

pub use coplanar::cones_coplanar5;
pub use one_oriented::{cone_1n3p, cone_1n3p_quadrics};
pub use six_points::{cone6p_system, cone_6p, Cone6PSystem};
pub use two_oriented::{cone_2n, cone_2n_geometry, cone_2n_spurious_branch, Cone2NGeometry, Line3};

use crate::geom::{cone_residual, normal_deviation, Cone, OrientedPoint};
use crate::refine::polish_cone;
use crate::tol;

/// Polishes a candidate and keeps it if it interpolates every sample.
pub(crate) fn accept(cone: &Cone, samples: &[OrientedPoint]) -> Option<Cone> {
    let c = polish_cone(cone, samples);
    let ok = samples.iter().all(|s| {
        (s.p - c.apex).norm() > tol::APEX_GUARD
            && cone_residual(&c, &s.p).is_ok_and(|r| r <= tol::VALIDATE)
            && (s.n.is_none() || normal_deviation(&c, s).is_ok_and(|d| d <= tol::VALIDATE))
    });
    ok.then_some(c)
}

pub(crate) fn push_unique(out: &mut Vec<Cone>, c: Cone) {
    if !out.iter().any(|o| o.param_distance(&c) <= 1e-6) {
        out.push(c);
    }
}
