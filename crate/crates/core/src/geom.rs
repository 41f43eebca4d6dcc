//! Points, directions, rigid motions and the two primitive surfaces.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FitError, Result};

/// A point of the affine space, in any consistent length unit.
pub type Point3 = Vector3<f64>;

/// Tolerance used to accept a point as lying on a primitive before measuring
/// its normal deviation.
pub const ON_SURFACE_TOL: f64 = 1e-6;

/// A unit direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Dir3(Vector3<f64>);

impl Dir3 {
    pub fn new(v: Vector3<f64>) -> Result<Self> {
        if !v.iter().all(|c| c.is_finite()) {
            return Err(FitError::NonFinite);
        }
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(FitError::ZeroVector);
        }
        Ok(Dir3(v / norm))
    }

    pub fn from_xyz(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(Vector3::new(x, y, z))
    }

    pub fn x(&self) -> f64 {
        self.0.x
    }

    pub fn y(&self) -> f64 {
        self.0.y
    }

    pub fn z(&self) -> f64 {
        self.0.z
    }

    pub fn as_vec(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Vector3<f64> {
        self.0
    }

    /// Flips the direction so that its first nonzero component is positive.
    pub fn sign_normalized(self) -> Self {
        match self.0.iter().find(|c| **c != 0.0) {
            Some(c) if *c < 0.0 => Dir3(-self.0),
            _ => self,
        }
    }

    /// Angle between the two lines spanned by `self` and `other`, in `[0, pi/2]`.
    pub fn line_angle(&self, other: &Dir3) -> f64 {
        fold_angle(angle_between(&self.0, &other.0))
    }

    /// Euclidean distance between the two lines' unit representatives,
    /// insensitive to sign.
    pub fn line_distance(&self, other: &Dir3) -> f64 {
        (self.0 - other.0).norm().min((self.0 + other.0).norm())
    }
}

/// Angle in `[0, pi]` between two nonzero vectors.
pub(crate) fn angle_between(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    // atan2 keeps full precision near 0 and pi, unlike acos of the cosine.
    a.cross(b).norm().atan2(a.dot(b))
}

/// Folds an angle in `[0, pi]` into `[0, pi/2]` (unoriented lines).
pub(crate) fn fold_angle(a: f64) -> f64 {
    if a > FRAC_PI_2 {
        std::f64::consts::PI - a
    } else {
        a
    }
}

/// A point, optionally carrying an unoriented normal direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrientedPoint {
    pub p: Point3,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Dir3>,
}

impl OrientedPoint {
    pub fn plain(p: Point3) -> Self {
        OrientedPoint { p, n: None }
    }

    pub fn oriented(p: Point3, n: Vector3<f64>) -> Result<Self> {
        Ok(OrientedPoint { p, n: Some(Dir3::new(n)?) })
    }

    pub fn normal(&self) -> Result<Dir3> {
        self.n.ok_or(FitError::MissingNormal)
    }
}

/// A proper rigid motion `x -> rotation * x + translation`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidMotion {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl RigidMotion {
    pub fn identity() -> Self {
        RigidMotion { rotation: Matrix3::identity(), translation: Vector3::zeros() }
    }

    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        let defect = (rotation.transpose() * rotation - Matrix3::identity()).amax();
        if defect > 1e-12 || (rotation.determinant() - 1.0).abs() > 1e-12 {
            return Err(FitError::InvalidPrimitive("rotation is not orthonormal"));
        }
        Ok(RigidMotion { rotation, translation })
    }

    pub fn apply(&self, p: &Point3) -> Point3 {
        self.rotation * p + self.translation
    }

    pub fn apply_dir(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * v
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        RigidMotion { rotation: rt, translation: -(rt * self.translation) }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &RigidMotion) -> Self {
        RigidMotion {
            rotation: next.rotation * self.rotation,
            translation: next.rotation * self.translation + next.translation,
        }
    }

    /// Uniformly random rotation composed with a translation drawn from
    /// `[-spread, spread]^3`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, spread: f64) -> Self {
        let axis = random_unit(rng);
        let angle = rng.random_range(0.0..std::f64::consts::PI);
        let rotation = *nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_unchecked(axis), angle).matrix();
        let translation = Vector3::from_fn(|_, _| rng.random_range(-spread..=spread));
        RigidMotion { rotation, translation }
    }
}

/// Uniformly distributed unit vector.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v: Vector3<f64> = Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let n2 = v.norm_squared();
        if n2 > 1e-6 && n2 <= 1.0 {
            return v / n2.sqrt();
        }
    }
}

/// Similarity `x -> scale * rotation * x + translation`, used to move
/// primitives in and out of the solvers' canonical frames.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Similarity {
    pub scale: f64,
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl Similarity {
    pub fn identity() -> Self {
        Similarity { scale: 1.0, rotation: Matrix3::identity(), translation: Vector3::zeros() }
    }

    pub fn apply(&self, p: &Point3) -> Point3 {
        self.scale * (self.rotation * p) + self.translation
    }

    pub fn apply_dir(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * v
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Similarity { scale: 1.0 / self.scale, rotation: rt, translation: -(rt * self.translation) / self.scale }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Similarity) -> Self {
        Similarity {
            scale: self.scale * next.scale,
            rotation: next.rotation * self.rotation,
            translation: next.scale * (next.rotation * self.translation) + next.translation,
        }
    }

    /// Maps the bounding box of `pts` onto a box of unit diagonal centred at
    /// the origin. Fails if all points coincide.
    pub fn unit_box(pts: &[Point3]) -> Result<Self> {
        if pts.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(FitError::NonFinite);
        }
        let mut lo = pts[0];
        let mut hi = pts[0];
        for p in pts {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        let diag = (hi - lo).norm();
        if diag <= 1e-300 {
            return Err(FitError::CoincidentPoints);
        }
        let center = (lo + hi) / 2.0;
        Ok(Similarity { scale: 1.0 / diag, rotation: Matrix3::identity(), translation: -center / diag })
    }
}

impl From<RigidMotion> for Similarity {
    fn from(m: RigidMotion) -> Self {
        Similarity { scale: 1.0, rotation: m.rotation, translation: m.translation }
    }
}

/// Common surface interface of [`Cylinder`] and [`Cone`].
pub trait Surface: Sized {
    /// Distance-like residual, zero iff `p` is on the surface.
    fn residual(&self, p: &Point3) -> Result<f64>;
    /// Unnormalized surface normal at `p`.
    fn normal_at(&self, p: &Point3) -> Result<Vector3<f64>>;
    /// Scale-free residual used to decide whether a point is on the surface.
    fn relative_residual(&self, p: &Point3) -> Result<f64> {
        self.residual(p)
    }
    /// Image of the surface under a similarity.
    fn transformed(&self, s: &Similarity) -> Self;
}

/// Right circular cylinder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cylinder {
    pub axis_point: Point3,
    pub axis_dir: Dir3,
    pub radius: f64,
}

impl Cylinder {
    pub fn new(axis_point: Point3, axis_dir: Vector3<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(FitError::InvalidPrimitive("cylinder radius must be positive and finite"));
        }
        if !axis_point.iter().all(|c| c.is_finite()) {
            return Err(FitError::NonFinite);
        }
        Ok(Cylinder { axis_point, axis_dir: Dir3::new(axis_dir)?.sign_normalized(), radius })
    }

    /// Point of the axis closest to `reference`.
    pub fn axis_foot(&self, reference: &Point3) -> Point3 {
        let d = self.axis_dir.as_vec();
        self.axis_point + d * (reference - self.axis_point).dot(d)
    }

    pub fn distance_to_axis(&self, p: &Point3) -> f64 {
        (p - self.axis_foot(p)).norm()
    }

    /// Largest discrepancy among axis direction, axis position (measured at
    /// the foot of `reference`) and radius.
    pub fn param_distance(&self, other: &Cylinder, reference: &Point3) -> f64 {
        let dir = self.axis_dir.line_distance(&other.axis_dir);
        let foot = (self.axis_foot(reference) - other.axis_foot(reference)).norm();
        let radius = (self.radius - other.radius).abs();
        dir.max(foot).max(radius)
    }

    /// Point at height `h` along the axis and angle `phi` around it.
    pub fn sample(&self, h: f64, phi: f64) -> Point3 {
        let (e1, e2) = orthonormal_complement(self.axis_dir.as_vec());
        self.axis_point + self.axis_dir.as_vec() * h + (e1 * phi.cos() + e2 * phi.sin()) * self.radius
    }
}

impl Surface for Cylinder {
    fn residual(&self, p: &Point3) -> Result<f64> {
        Ok(cylinder_residual(self, p))
    }

    fn normal_at(&self, p: &Point3) -> Result<Vector3<f64>> {
        let radial = p - self.axis_foot(p);
        if radial.norm() == 0.0 {
            return Err(FitError::OffSurface(self.radius));
        }
        Ok(radial)
    }

    fn relative_residual(&self, p: &Point3) -> Result<f64> {
        Ok(cylinder_residual(self, p) / self.radius)
    }

    fn transformed(&self, s: &Similarity) -> Self {
        Cylinder {
            axis_point: s.apply(&self.axis_point),
            axis_dir: Dir3(s.apply_dir(self.axis_dir.as_vec())).sign_normalized(),
            radius: self.radius * s.scale,
        }
    }
}

/// Right circular cone. The surface consists of both nappes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cone {
    pub apex: Point3,
    pub axis_dir: Dir3,
    pub half_angle: f64,
}

impl Cone {
    pub fn new(apex: Point3, axis_dir: Vector3<f64>, half_angle: f64) -> Result<Self> {
        if !(half_angle > 0.0 && half_angle < FRAC_PI_2) {
            return Err(FitError::InvalidPrimitive("cone half-angle must lie in (0, pi/2)"));
        }
        if !apex.iter().all(|c| c.is_finite()) {
            return Err(FitError::NonFinite);
        }
        Ok(Cone { apex, axis_dir: Dir3::new(axis_dir)?.sign_normalized(), half_angle })
    }

    /// Largest discrepancy among apex position, axis direction and half-angle.
    pub fn param_distance(&self, other: &Cone) -> f64 {
        let apex = (self.apex - other.apex).norm();
        let dir = self.axis_dir.line_distance(&other.axis_dir);
        let angle = (self.half_angle - other.half_angle).abs();
        apex.max(dir).max(angle)
    }

    /// Point at signed distance `s` from the apex along the generatrix at
    /// angle `phi` around the axis.
    pub fn sample(&self, s: f64, phi: f64) -> Point3 {
        let d = self.axis_dir.as_vec();
        let (e1, e2) = orthonormal_complement(d);
        let (sin, cos) = self.half_angle.sin_cos();
        self.apex + (d * cos + (e1 * phi.cos() + e2 * phi.sin()) * sin) * s
    }
}

impl Surface for Cone {
    fn residual(&self, p: &Point3) -> Result<f64> {
        cone_residual(self, p)
    }

    fn normal_at(&self, p: &Point3) -> Result<Vector3<f64>> {
        let v = p - self.apex;
        if v.norm() <= 1e-300 {
            return Err(FitError::ApexQuery);
        }
        let d = self.axis_dir.as_vec();
        let cos2 = self.half_angle.cos().powi(2);
        // Gradient of (v.d)^2 - cos^2(theta) |v|^2.
        Ok(d * (2.0 * v.dot(d)) - v * (2.0 * cos2))
    }

    fn transformed(&self, s: &Similarity) -> Self {
        Cone {
            apex: s.apply(&self.apex),
            axis_dir: Dir3(s.apply_dir(self.axis_dir.as_vec())).sign_normalized(),
            half_angle: self.half_angle,
        }
    }
}

/// Either primitive, for code that handles both.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Primitive {
    Cylinder(Cylinder),
    Cone(Cone),
}

impl From<Cylinder> for Primitive {
    fn from(c: Cylinder) -> Self {
        Primitive::Cylinder(c)
    }
}

impl From<Cone> for Primitive {
    fn from(c: Cone) -> Self {
        Primitive::Cone(c)
    }
}

impl Surface for Primitive {
    fn residual(&self, p: &Point3) -> Result<f64> {
        match self {
            Primitive::Cylinder(c) => c.residual(p),
            Primitive::Cone(c) => c.residual(p),
        }
    }

    fn normal_at(&self, p: &Point3) -> Result<Vector3<f64>> {
        match self {
            Primitive::Cylinder(c) => c.normal_at(p),
            Primitive::Cone(c) => c.normal_at(p),
        }
    }

    fn relative_residual(&self, p: &Point3) -> Result<f64> {
        match self {
            Primitive::Cylinder(c) => c.relative_residual(p),
            Primitive::Cone(c) => c.relative_residual(p),
        }
    }

    fn transformed(&self, s: &Similarity) -> Self {
        match self {
            Primitive::Cylinder(c) => Primitive::Cylinder(c.transformed(s)),
            Primitive::Cone(c) => Primitive::Cone(c.transformed(s)),
        }
    }
}

/// `| dist(p, axis) - radius |`.
pub fn cylinder_residual(c: &Cylinder, p: &Point3) -> f64 {
    (c.distance_to_axis(p) - c.radius).abs()
}

/// Angular residual `| angle(apex->p, axis) - half_angle |`, with the angle
/// folded so that both nappes count.
pub fn cone_residual(c: &Cone, p: &Point3) -> Result<f64> {
    let v = p - c.apex;
    if v.norm() <= 1e-300 {
        return Err(FitError::ApexQuery);
    }
    Ok((fold_angle(angle_between(&v, c.axis_dir.as_vec())) - c.half_angle).abs())
}

/// Angle in `[0, pi/2]` between the normal carried by `op` and the surface
/// normal line at `op.p`.
pub fn normal_deviation<S: Surface>(s: &S, op: &OrientedPoint) -> Result<f64> {
    let n = op.normal()?;
    let off = s.relative_residual(&op.p)?;
    if off > ON_SURFACE_TOL {
        return Err(FitError::OffSurface(off));
    }
    let normal = s.normal_at(&op.p)?;
    if normal.norm() == 0.0 {
        return Err(FitError::ApexQuery);
    }
    Ok(fold_angle(angle_between(n.as_vec(), &normal)))
}

/// Two unit vectors completing `d` (unit) to a right-handed orthonormal basis
/// `(e1, e2, d)`.
pub fn orthonormal_complement(d: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let aux = if d.z.abs() > 0.9 { Vector3::x() } else { Vector3::z() };
    let e1 = (aux - d * aux.dot(d)).normalize();
    let e2 = d.cross(&e1);
    (e1, e2)
}

/// Rigid motion sending `op.p` to the origin and `op.n` to `(0, 0, 1)`.
pub fn canonical_frame_oriented(op: &OrientedPoint) -> Result<RigidMotion> {
    let n = *op.normal()?.as_vec();
    let (u, v) = orthonormal_complement(&n);
    let rotation = Matrix3::from_rows(&[u.transpose(), v.transpose(), n.transpose()]);
    Ok(RigidMotion { rotation, translation: -(rotation * op.p) })
}

/// Frame produced by [`canonical_frame_points`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointFrame {
    pub motion: RigidMotion,
    /// Set when the first three points are collinear; the y axis is then an
    /// arbitrary completion and `y3 = 0`.
    pub reduced: bool,
}

/// Rigid motion sending `p1` to the origin, `p2` onto the positive x axis
/// and `p3` into the upper half of the xy plane.
pub fn canonical_frame_points(pts: &[Point3]) -> Result<PointFrame> {
    if pts.len() < 3 {
        return Err(FitError::Arity { expected: 3, got: pts.len() });
    }
    let (p1, p2, p3) = (pts[0], pts[1], pts[2]);
    let scale = p1.norm().max(p2.norm()).max(p3.norm()).max(1.0);
    let d12 = p2 - p1;
    if d12.norm() <= 1e-12 * scale {
        return Err(FitError::CoincidentPoints);
    }
    let e1 = d12.normalize();
    let d13 = p3 - p1;
    let w = d13 - e1 * d13.dot(&e1);
    let (e2, reduced) = if w.norm() <= 1e-12 * scale {
        let (_, e2) = orthonormal_complement(&e1);
        (e2, true)
    } else {
        (w.normalize(), false)
    };
    let e3 = e1.cross(&e2);
    let rotation = Matrix3::from_rows(&[e1.transpose(), e2.transpose(), e3.transpose()]);
    Ok(PointFrame { motion: RigidMotion { rotation, translation: -(rotation * p1) }, reduced })
}

/// Qualitative outcome of a solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionKind {
    Finite,
    Empty,
    InfiniteFamily,
}

/// Why a solution set has the shape it has.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    /// Generic configuration handled by the main algebraic branch.
    Generic,
    CoincidentPoints,
    /// All points lie in the plane normal to the oriented point's normal.
    NormalPlaneCoplanar,
    /// Two points are symmetric about the oriented point's normal line.
    MirrorSymmetric,
    /// The two plain points lie on opposite sides of the normal plane.
    OppositeSides,
    ParallelNormals,
    /// The normal lines meet at a point equidistant from both data points.
    EquidistantIntersection,
    /// The normal lines meet; the two cones share their apex.
    IntersectingNormals,
    /// Five (or six) points lie in a common plane on a conic.
    CoplanarConic,
    CollinearPoints,
    /// Coplanar points on a degenerate conic (a pair of lines).
    DegenerateConic,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Reason::Generic => "generic",
            Reason::CoincidentPoints => "coincident_points",
            Reason::NormalPlaneCoplanar => "normal_plane_coplanar",
            Reason::MirrorSymmetric => "mirror_symmetric",
            Reason::OppositeSides => "opposite_sides",
            Reason::ParallelNormals => "parallel_normals",
            Reason::EquidistantIntersection => "equidistant_intersection",
            Reason::IntersectingNormals => "intersecting_normals",
            Reason::CoplanarConic => "coplanar_conic",
            Reason::CollinearPoints => "collinear_points",
            Reason::DegenerateConic => "degenerate_conic",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnosis {
    pub reason: Reason,
    pub note: String,
}

/// Primitives found by a solver together with a diagnosis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionSet<T> {
    pub kind: SolutionKind,
    pub primitives: Vec<T>,
    pub diagnosis: Diagnosis,
}

impl<T> SolutionSet<T> {
    /// Finite set; collapses to `Empty` when `primitives` is empty.
    pub fn finite(primitives: Vec<T>, reason: Reason, note: impl Into<String>) -> Self {
        let kind = if primitives.is_empty() { SolutionKind::Empty } else { SolutionKind::Finite };
        SolutionSet { kind, primitives, diagnosis: Diagnosis { reason, note: note.into() } }
    }

    pub fn empty(reason: Reason, note: impl Into<String>) -> Self {
        SolutionSet {
            kind: SolutionKind::Empty,
            primitives: Vec::new(),
            diagnosis: Diagnosis { reason, note: note.into() },
        }
    }

    pub fn infinite(reason: Reason, note: impl Into<String>) -> Self {
        SolutionSet {
            kind: SolutionKind::InfiniteFamily,
            primitives: Vec::new(),
            diagnosis: Diagnosis { reason, note: note.into() },
        }
    }

    pub fn len(&self) -> usize {
        self.primitives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primitives.is_empty()
    }

    /// True when the diagnosis records that a double root was merged.
    pub fn has_merged_root(&self) -> bool {
        self.diagnosis.note.contains("multiplicity 2")
    }

    pub fn map<U>(self, f: impl FnMut(T) -> U) -> SolutionSet<U> {
        SolutionSet {
            kind: self.kind,
            primitives: self.primitives.into_iter().map(f).collect(),
            diagnosis: self.diagnosis,
        }
    }
}

impl<T: Surface> SolutionSet<T> {
    pub(crate) fn transformed(self, s: &Similarity) -> Self {
        self.map(|p| p.transformed(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_4;

    fn z_cylinder() -> Cylinder {
        Cylinder::new(Point3::zeros(), Vector3::z(), 1.0).unwrap()
    }

    fn z_cone() -> Cone {
        Cone::new(Point3::zeros(), Vector3::z(), FRAC_PI_4).unwrap()
    }

    #[test]
    fn oriented_frame_identity_when_canonical() {
        let op = OrientedPoint::oriented(Point3::zeros(), Vector3::z()).unwrap();
        let m = canonical_frame_oriented(&op).unwrap();
        assert!((m.rotation - Matrix3::identity()).amax() < 1e-15);
        assert!(m.translation.norm() < 1e-15);
    }

    #[test]
    fn oriented_frame_maps_point_and_normal() {
        let op = OrientedPoint::oriented(Point3::new(1.0, 2.0, 3.0), Vector3::x()).unwrap();
        let m = canonical_frame_oriented(&op).unwrap();
        assert!(m.apply(&op.p).norm() < 1e-14);
        assert!((m.apply_dir(op.n.unwrap().as_vec()) - Vector3::z()).norm() < 1e-14);
        RigidMotion::new(m.rotation, m.translation).unwrap();
    }

    #[test]
    fn oriented_frame_flips_downward_normal() {
        let op = OrientedPoint::oriented(Point3::zeros(), -Vector3::z()).unwrap();
        let m = canonical_frame_oriented(&op).unwrap();
        assert!(m.translation.norm() == 0.0);
        assert!((m.apply_dir(&-Vector3::z()) - Vector3::z()).norm() < 1e-15);
        assert!((m.rotation.determinant() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn oriented_frame_requires_normal() {
        let op = OrientedPoint::plain(Point3::zeros());
        assert_eq!(canonical_frame_oriented(&op), Err(FitError::MissingNormal));
    }

    #[test]
    fn point_frame_identity_when_canonical() {
        let pts = [Point3::zeros(), Point3::new(2.0, 0.0, 0.0), Point3::new(0.5, 1.0, 0.0)];
        let f = canonical_frame_points(&pts).unwrap();
        assert!(!f.reduced);
        assert!((f.motion.rotation - Matrix3::identity()).amax() < 1e-15);
    }

    #[test]
    fn point_frame_pattern_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<Point3> = (0..5).map(|_| Point3::from_fn(|_, _| rng.random_range(-1.0..1.0))).collect();
        let f = canonical_frame_points(&pts).unwrap();
        let q: Vec<Point3> = pts.iter().map(|p| f.motion.apply(p)).collect();
        assert!(q[0].norm() < 1e-14);
        assert!(q[1].y.abs() < 1e-14 && q[1].z.abs() < 1e-14 && q[1].x > 0.0);
        assert!(q[2].z.abs() < 1e-14 && q[2].y > 0.0);
        for i in 0..5 {
            for j in 0..5 {
                let d0 = (pts[i] - pts[j]).norm();
                let d1 = (q[i] - q[j]).norm();
                assert!((d0 - d1).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn point_frame_rejects_coincident() {
        let pts = [Point3::new(1.0, 1.0, 1.0), Point3::new(1.0, 1.0, 1.0), Point3::zeros()];
        assert_eq!(canonical_frame_points(&pts), Err(FitError::CoincidentPoints));
    }

    #[test]
    fn point_frame_flags_collinear() {
        let pts = [Point3::zeros(), Point3::x(), Point3::new(3.0, 0.0, 0.0)];
        assert!(canonical_frame_points(&pts).unwrap().reduced);
    }

    #[test]
    fn cylinder_residual_examples() {
        let c = z_cylinder();
        assert_eq!(cylinder_residual(&c, &Point3::new(1.0, 0.0, 5.0)), 0.0);
        assert_eq!(cylinder_residual(&c, &Point3::new(2.0, 0.0, 0.0)), 1.0);
    }

    #[test]
    fn cylinder_residual_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let c = Cylinder::new(
                Point3::from_fn(|_, _| rng.random_range(-1.0..1.0)),
                random_unit(&mut rng),
                rng.random_range(0.1..2.0),
            )
            .unwrap();
            let p = c.sample(rng.random_range(-2.0..2.0), rng.random_range(0.0..6.3));
            assert!(cylinder_residual(&c, &p) < 1e-12);
        }
    }

    #[test]
    fn cone_residual_examples() {
        let c = z_cone();
        assert!(cone_residual(&c, &Point3::new(1.0, 0.0, 1.0)).unwrap() < 1e-15);
        assert!((cone_residual(&c, &Point3::new(0.0, 0.0, 1.0)).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(cone_residual(&c, &Point3::zeros()), Err(FitError::ApexQuery));
        // Lower nappe.
        assert!(cone_residual(&c, &Point3::new(0.0, 2.0, -2.0)).unwrap() < 1e-15);
    }

    #[test]
    fn cone_residual_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let c = Cone::new(
                Point3::from_fn(|_, _| rng.random_range(-1.0..1.0)),
                random_unit(&mut rng),
                rng.random_range(0.1..1.4),
            )
            .unwrap();
            let p = c.sample(rng.random_range(0.2..2.0), rng.random_range(0.0..6.3));
            assert!(cone_residual(&c, &p).unwrap() < 1e-12);
        }
    }

    #[test]
    fn normal_deviation_examples() {
        let c = z_cylinder();
        let op = OrientedPoint::oriented(Point3::x(), Vector3::x()).unwrap();
        assert!(normal_deviation(&c, &op).unwrap() < 1e-15);
        let op = OrientedPoint::oriented(Point3::x(), -Vector3::x()).unwrap();
        assert!(normal_deviation(&c, &op).unwrap() < 1e-15);
        let off = OrientedPoint::oriented(Point3::new(3.0, 0.0, 0.0), Vector3::x()).unwrap();
        assert!(matches!(normal_deviation(&c, &off), Err(FitError::OffSurface(_))));
    }

    #[test]
    fn cone_normal_matches_finite_difference() {
        // Independent check of the analytic cone normal: the normal must be
        // orthogonal to two surface tangents estimated by finite differences.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let c = Cone::new(
                Point3::from_fn(|_, _| rng.random_range(-1.0..1.0)),
                random_unit(&mut rng),
                rng.random_range(0.2..1.3),
            )
            .unwrap();
            let (s, phi) = (rng.random_range(0.5..2.0), rng.random_range(0.0..6.3));
            let p = c.sample(s, phi);
            let h = 1e-6;
            let ts = (c.sample(s + h, phi) - c.sample(s - h, phi)) / (2.0 * h);
            let tp = (c.sample(s, phi + h) - c.sample(s, phi - h)) / (2.0 * h);
            let exact = ts.cross(&tp);
            let op = OrientedPoint::oriented(p, exact).unwrap();
            assert!(normal_deviation(&c, &op).unwrap() < 1e-8);
        }
    }

    #[test]
    fn sign_normalization_is_idempotent() {
        let d = Dir3::from_xyz(0.0, -1.0, 2.0).unwrap().sign_normalized();
        assert!(d.y() > 0.0);
        assert_eq!(d, d.sign_normalized());
    }

    #[test]
    fn rejects_degenerate_primitives() {
        assert!(Cylinder::new(Point3::zeros(), Vector3::z(), 0.0).is_err());
        assert!(Cone::new(Point3::zeros(), Vector3::z(), FRAC_PI_2).is_err());
        assert!(Cone::new(Point3::zeros(), Vector3::z(), 0.0).is_err());
        assert!(Dir3::new(Vector3::zeros()).is_err());
    }

    #[test]
    fn similarity_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m: Similarity = RigidMotion::random(&mut rng, 3.0).into();
        let s = Similarity { scale: 2.5, ..m };
        let p = Point3::new(0.3, -1.0, 2.0);
        assert!((s.inverse().apply(&s.apply(&p)) - p).norm() < 1e-14);
        let t = s.then(&s.inverse());
        assert!((t.apply(&p) - p).norm() < 1e-14);
    }
}
