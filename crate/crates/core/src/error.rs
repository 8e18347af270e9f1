use thiserror::Error;

/// Errors raised by the geometry, integration and optimization routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot project the zero vector onto the sphere")]
    ZeroVector,
    #[error("vector is not unit length (norm {norm})")]
    NotUnit { norm: f64 },
    #[error("dimension {dim} is below the supported minimum of 3")]
    DimensionTooSmall { dim: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("expected {expected} vertices, found {found}")]
    VertexCount { expected: usize, found: usize },
    #[error("vertices are affinely dependent (smallest singular value {sigma:e})")]
    DegenerateSimplex { sigma: f64 },
    #[error("circumcenter of the face opposite vertex {face} is at the origin")]
    DegenerateFace { face: usize },
    #[error("spherical simplex generators are linearly dependent (smallest singular value {sigma:e})")]
    SingularGenerators { sigma: f64 },
    #[error("spherical centroid undefined: resultant norm {norm:e} below threshold")]
    UndefinedCentroid { norm: f64 },
    #[error("region received no samples")]
    EmptyRegion,
    #[error("voronoi cell {cell} received only {count} samples")]
    EmptyCell { cell: usize, count: u64 },
    #[error("simplex does not cover the sphere with closed hemispheres")]
    NotCovering,
    #[error("region sample at x_1 = {x1:e} lies outside the closed hemisphere")]
    OutsideHemisphere { x1: f64 },
    #[error("weights alpha and beta must be strictly positive")]
    NonPositiveWeight,
    #[error("points are antipodal or too close to antipodal")]
    AntipodalPoints,
    #[error("sphere functions are defined on different grids")]
    GridMismatch,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
