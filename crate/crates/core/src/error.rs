use num_complex::Complex;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Two vectors with incompatible ambient dimensions were combined.
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    /// A model conversion hit the chart's excluded point (e.g. hemisphere
    /// point with u_n = -1, or the lower apex under the Poincare map).
    #[error("point at infinity: {0}")]
    PointAtInfinity(String),

    /// A metric density was requested where the model density is singular.
    #[error("singular density at the ideal boundary (x0 = 0)")]
    SingularDensity,

    /// The requested geodesic path type does not exist for the given pair.
    #[error("invalid path: {0}")]
    InvalidPath(String),

    /// An ideal point was passed where a finite point is required.
    #[error("ideal endpoint: {0}")]
    IdealEndpoint(String),

    /// Dihedral angle of boundaries that do not intersect.
    #[error("boundaries do not intersect (|e1*e2| >= 1)")]
    NonIntersecting,

    /// An input vector failed a unit-norm or classification precondition.
    #[error("invalid normal: {0}")]
    InvalidNormal(String),

    /// mu_u requested for a polytope containing the model's point at infinity.
    #[error("polytope contains the point at infinity of the half-space model")]
    PointAtInfinityInPolytope,

    /// An iterative computation stopped before reaching its tolerance.
    /// Carries the partial value and the residual estimate.
    #[error("did not converge (residual {residual:.3e})")]
    NonConverged {
        partial: Complex<f64>,
        residual: f64,
    },

    /// The sweep slice is tangent to a wall; the slice functional is singular.
    #[error("tangent slice: {0}")]
    TangentSlice(String),

    /// A deformation path crossed (or started at) an ideal vertex.
    #[error("ideal vertex on deformation path: {0}")]
    IdealVertexOnPath(String),

    /// The combinatorial type of the polytope changed within the finite
    /// difference stencil of a derivative check.
    #[error("combinatorial type change along path: {0}")]
    CombinatorialChange(String),

    /// Least-squares system condition number exceeded the hard limit.
    #[error("ill-conditioned fit (condition number {0:.3e})")]
    IllConditioned(f64),

    /// The operation is outside the supported domain (dimension caps,
    /// generic boundary polytopes, ...).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A scalar argument was outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed JSON or structurally invalid polytope description.
    #[error("parse error: {0}")]
    Parse(String),
}
