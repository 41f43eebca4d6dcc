use thiserror::Error;

/// Errors raised by the geometric primitives and the solvers.
///
/// Degenerate configurations that still have a well-defined answer (no
/// primitive, or an infinite family of them) are reported through
/// [`SolutionSet`](crate::SolutionSet) instead of an error.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("oriented point has no normal")]
    MissingNormal,
    #[error("input points coincide")]
    CoincidentPoints,
    #[error("cone residual queried at the apex")]
    ApexQuery,
    #[error("point is not on the surface (residual {0:e})")]
    OffSurface(f64),
    #[error("all coefficients of the quadratic vanish")]
    DegenerateQuadratic,
    #[error("zero polynomial")]
    ZeroInput,
    #[error("matrix polynomial has degree 0")]
    NotAPolynomialMatrix,
    #[error("singular pencil: det(A - lambda B) vanishes identically")]
    SingularPencil,
    #[error("input points are coplanar")]
    CoplanarInput,
    #[error("collinear points have no circumcircle")]
    FlatCircle,
    #[error("canonical frame pattern violated: {0}")]
    ParticularConfiguration(&'static str),
    #[error("zero-length vector")]
    ZeroVector,
    #[error("non-finite input")]
    NonFinite,
    #[error("invalid primitive: {0}")]
    InvalidPrimitive(&'static str),
    #[error("expected {expected} points, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("eigen solver failed: {0}")]
    Eigen(String),
}

pub type Result<T, E = FitError> = std::result::Result<T, E>;
