//! Points of `S^{d-1}`, radial projection, sampling, enclosing balls and
//! the hemisphere covering test.

mod ball;
pub mod sampling;
pub mod sobol;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) use ball::affine_circumcenter;
pub use ball::{min_enclosing_ball, Ball};
pub use sampling::{derive_seed, sample_uniform, splitmix64, SampleStream, SamplerKind};

/// Tolerance on `|x| - 1` for a [`UnitVector`].
pub const UNIT_TOLERANCE: f64 = 1e-12;
/// Below this norm a vector is treated as zero by [`project`].
pub const ZERO_NORM: f64 = 1e-300;
/// Smallest singular value below which a vertex or generator set is
/// considered dependent.
pub const DEPENDENCE_TOLERANCE: f64 = 1e-10;
/// Barycentric coordinates of the origin above `-COVER_TOLERANCE` count as
/// nonnegative.
pub const COVER_TOLERANCE: f64 = 1e-10;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// A point of the unit sphere `S^{d-1}` with `d >= 3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    /// Validates that `coords` already has unit norm.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 3 {
            return Err(Error::DimensionTooSmall { dim: coords.len() });
        }
        let n = norm(&coords);
        if !n.is_finite() || (n - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::NotUnit { norm: n });
        }
        Ok(Self(coords))
    }

    // Caller guarantees unit norm up to rounding.
    pub(crate) fn from_normalized(coords: Vec<f64>) -> Self {
        debug_assert!((norm(&coords) - 1.0).abs() < 1e-9);
        Self(coords)
    }

    /// The standard basis vector `e_{axis+1}` of `R^dim`.
    pub fn basis(dim: usize, axis: usize) -> Result<Self> {
        if dim < 3 {
            return Err(Error::DimensionTooSmall { dim });
        }
        if axis >= dim {
            return Err(Error::InvalidParameter(format!("axis {axis} out of range for dim {dim}")));
        }
        let mut v = vec![0.0; dim];
        v[axis] = 1.0;
        Ok(Self(v))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &UnitVector) -> f64 {
        dot(&self.0, &other.0)
    }

    /// Geodesic distance, accurate for both nearby and nearly antipodal points.
    pub fn angle_to(&self, other: &UnitVector) -> f64 {
        angle_between(&self.0, &other.0)
    }

    pub fn neg(&self) -> UnitVector {
        UnitVector(self.0.iter().map(|x| -x).collect())
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }
}

impl std::ops::Index<usize> for UnitVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl AsRef<[f64]> for UnitVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for UnitVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        UnitVector::new(v)
    }
}

impl From<UnitVector> for Vec<f64> {
    fn from(u: UnitVector) -> Vec<f64> {
        u.0
    }
}

/// Angle between two unit vectors via `2 atan2(|a-b|, |a+b|)`.
pub fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let mut diff = 0.0;
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        diff += (x - y) * (x - y);
        sum += (x + y) * (x + y);
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}

/// Radial projection `x / |x|` onto the sphere.
pub fn project(x: &[f64]) -> Result<UnitVector> {
    if x.len() < 3 {
        return Err(Error::DimensionTooSmall { dim: x.len() });
    }
    let n = norm(x);
    if !(n >= ZERO_NORM) || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(UnitVector(x.iter().map(|xi| xi / n).collect()))
}

/// Barycentric coordinates of the origin with respect to `d+1` points of
/// `R^d`, or `DegenerateSimplex` if the points are affinely dependent.
pub fn origin_barycentric(vertices: &[&[f64]]) -> Result<Vec<f64>> {
    let m = vertices.len();
    let d = vertices.first().map_or(0, |v| v.len());
    if m != d + 1 {
        return Err(Error::VertexCount { expected: d + 1, found: m });
    }
    if let Some(v) = vertices.iter().find(|v| v.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: v.len() });
    }
    let sigma = edge_matrix_min_singular_value(vertices);
    if sigma < DEPENDENCE_TOLERANCE {
        return Err(Error::DegenerateSimplex { sigma });
    }
    // [v_0 .. v_d; 1 .. 1] lambda = [0; 1]
    let a = DMatrix::from_fn(d + 1, d + 1, |r, c| if r < d { vertices[c][r] } else { 1.0 });
    let mut rhs = DVector::zeros(d + 1);
    rhs[d] = 1.0;
    let lambda = a.lu().solve(&rhs).ok_or(Error::DegenerateSimplex { sigma })?;
    Ok(lambda.iter().copied().collect())
}

/// Smallest singular value of the edge matrix `[v_1 - v_0, ..., v_m - v_0]`.
pub fn edge_matrix_min_singular_value(vertices: &[&[f64]]) -> f64 {
    if vertices.len() < 2 {
        return 0.0;
    }
    let d = vertices[0].len();
    let edges = DMatrix::from_fn(d, vertices.len() - 1, |r, c| vertices[c + 1][r] - vertices[0][r]);
    edges.singular_values().min()
}

/// Whether the closed hemispheres `{x : x . v_i >= 0}` cover the sphere,
/// i.e. whether the origin lies in the convex hull of the vertices.
pub fn covers_sphere(vertices: &[UnitVector]) -> Result<bool> {
    let refs: Vec<&[f64]> = vertices.iter().map(|v| v.as_slice()).collect();
    covers_sphere_raw(&refs)
}

pub(crate) fn covers_sphere_raw(vertices: &[&[f64]]) -> Result<bool> {
    let lambda = origin_barycentric(vertices)?;
    Ok(lambda.iter().all(|&l| l >= -COVER_TOLERANCE))
}
