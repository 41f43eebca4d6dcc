//! Fixed tolerances, all in unit-scaled coordinates (bounding-box diagonal 1).

/// Two points closer than this are treated as coincident.
pub const COINCIDENT: f64 = 1e-10;
/// Coordinates below this are treated as zero when testing signs.
pub const ZERO: f64 = 1e-12;
/// Largest distance from a common plane for points to count as coplanar.
pub const COPLANAR: f64 = 1e-9;
/// Largest deviation of a projected point from the fitted circle.
pub const CIRCLE: f64 = 1e-6;
/// Residual bound used when validating candidate primitives.
pub const VALIDATE: f64 = 1e-7;
/// Smallest accepted blow-up parameter `w = n^2`.
pub const POSITIVE_W: f64 = 1e-12;
/// Smallest distance between a cone apex and a data point.
pub const APEX_GUARD: f64 = 1e-9;
