//! Cylinders through point and normal data.

mod circle;
mod coplanar;
mod five_points;
mod one_oriented;

pub(crate) use circle::best_triple;
pub use circle::{circumcircle, Circle3D};
pub use coplanar::cyl_coplanar5;
pub use five_points::{cyl5p_chord_polys, cyl5p_cubic, cyl5p_quotient, cyl5p_reduced_system, cyl_5p, Cyl5PSystem};
pub use one_oriented::{cyl_1n2p, cyl_1n2p_coeffs, Cyl1N2PCoeffs};
