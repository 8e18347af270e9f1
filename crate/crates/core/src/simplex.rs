//! Euclidean simplexes inscribed in the unit ball, their spherical images
//! (Voronoi cells on the sphere), face circumcenters, and spherical
//! simplexes given by cone generators.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{
    self, dot, edge_matrix_min_singular_value, project, UnitVector, DEPENDENCE_TOLERANCE,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexRecord {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub relaxed: bool,
}

impl From<EuclideanSimplex> for SimplexRecord {
    fn from(s: EuclideanSimplex) -> Self {
        let dim = s.dim();
        SimplexRecord { dim, vertices: s.vertices, relaxed: s.validation == Validation::Relaxed }
    }
}

impl TryFrom<SimplexRecord> for EuclideanSimplex {
    type Error = Error;
    fn try_from(r: SimplexRecord) -> Result<Self> {
        if let Some(v) = r.vertices.iter().find(|v| v.len() != r.dim) {
            return Err(Error::DimensionMismatch { expected: r.dim, found: v.len() });
        }
        let validation = if r.relaxed { Validation::Relaxed } else { Validation::Strict };
        EuclideanSimplex::from_raw(r.vertices, validation)
    }
}

/// Tolerance on negative cone coordinates for spherical-simplex membership.
pub const CONE_TOLERANCE: f64 = 1e-10;
/// A face circumcenter closer than this to the origin has no direction.
pub const FACE_ORIGIN_TOLERANCE: f64 = 1e-12;

/// Whether construction enforces the inscribed-simplex invariants.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Validation {
    /// `d+1` unit, affinely independent vertices with `d >= 3`.
    #[default]
    Strict,
    /// Any nonempty vertex list of a common dimension (points, segments,
    /// scaled or degenerate bodies used as analytic anchors).
    Relaxed,
}

/// The convex hull of `d+1` vertices `v_0, ..., v_d` on `S^{d-1}`.
///
/// Serializes as `{"dim": d, "vertices": [[...], ...]}`; relaxed bodies add
/// `"relaxed": true`. Deserialization applies the same checks as
/// construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "SimplexRecord", try_from = "SimplexRecord")]
pub struct EuclideanSimplex {
    vertices: Vec<Vec<f64>>,
    validation: Validation,
}

impl EuclideanSimplex {
    pub fn new(vertices: Vec<UnitVector>) -> Result<Self> {
        let d = vertices.first().map_or(0, |v| v.dim());
        if d < 3 {
            return Err(Error::DimensionTooSmall { dim: d });
        }
        if vertices.len() != d + 1 {
            return Err(Error::VertexCount { expected: d + 1, found: vertices.len() });
        }
        if let Some(v) = vertices.iter().find(|v| v.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: v.dim() });
        }
        let raw: Vec<Vec<f64>> = vertices.into_iter().map(UnitVector::into_inner).collect();
        let refs: Vec<&[f64]> = raw.iter().map(|v| v.as_slice()).collect();
        let sigma = edge_matrix_min_singular_value(&refs);
        if sigma < DEPENDENCE_TOLERANCE {
            return Err(Error::DegenerateSimplex { sigma });
        }
        Ok(Self { vertices: raw, validation: Validation::Strict })
    }

    /// Builds a body from arbitrary points without the inscribed-simplex
    /// checks.
    pub fn relaxed(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let d = match vertices.first() {
            Some(v) => v.len(),
            None => return Err(Error::VertexCount { expected: 1, found: 0 }),
        };
        if d == 0 {
            return Err(Error::DimensionTooSmall { dim: 0 });
        }
        if let Some(v) = vertices.iter().find(|v| v.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: v.len() });
        }
        Ok(Self { vertices, validation: Validation::Relaxed })
    }

    pub fn from_raw(vertices: Vec<Vec<f64>>, validation: Validation) -> Result<Self> {
        match validation {
            Validation::Relaxed => Self::relaxed(vertices),
            Validation::Strict => {
                Self::new(vertices.into_iter().map(UnitVector::new).collect::<Result<Vec<_>>>()?)
            }
        }
    }

    /// The regular simplex inscribed in `S^{d-1}`, built from the Helmert
    /// basis of the hyperplane orthogonal to `(1, ..., 1)` in `R^{d+1}`.
    pub fn regular(dim: usize) -> Result<Self> {
        if dim < 3 {
            return Err(Error::DimensionTooSmall { dim });
        }
        let scale = ((dim + 1) as f64 / dim as f64).sqrt();
        let vertices = (0..=dim)
            .map(|i| {
                let coords: Vec<f64> = (1..=dim)
                    .map(|k| {
                        let h = 1.0 / ((k * (k + 1)) as f64).sqrt();
                        let entry = match i.cmp(&k) {
                            std::cmp::Ordering::Less => h,
                            std::cmp::Ordering::Equal => -(k as f64) * h,
                            std::cmp::Ordering::Greater => 0.0,
                        };
                        entry * scale
                    })
                    .collect();
                project(&coords)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(vertices)
    }

    /// Uniform random vertices, redrawn until the closed hemispheres cover
    /// the sphere and the vertices are affinely independent.
    pub fn random_covering(dim: usize, seed: u64) -> Result<Self> {
        if dim < 3 {
            return Err(Error::DimensionTooSmall { dim });
        }
        for attempt in 0..10_000u64 {
            let pts = sphere::sample_uniform(dim, dim + 1, sphere::derive_seed(seed, attempt))?;
            let Ok(s) = Self::new(pts) else { continue };
            if s.covers_sphere()? {
                return Ok(s);
            }
        }
        Err(Error::InvalidParameter("no covering simplex found in 10000 draws".into()))
    }

    /// The regular simplex with `v_0` rotated by `angle` radians toward `v_1`.
    pub fn perturbed_regular(dim: usize, angle: f64) -> Result<Self> {
        let reg = Self::regular(dim)?;
        let v0 = reg.vertex(0);
        let v1 = reg.vertex(1);
        let c = dot(v0, v1);
        let tangent = project(&v1.iter().zip(v0).map(|(b, a)| b - c * a).collect::<Vec<_>>())?;
        let moved: Vec<f64> =
            v0.iter().zip(tangent.as_slice()).map(|(a, t)| angle.cos() * a + angle.sin() * t).collect();
        let mut vertices: Vec<UnitVector> =
            reg.vertices.into_iter().map(UnitVector::from_normalized).collect();
        vertices[0] = project(&moved)?;
        Self::new(vertices)
    }

    pub fn validation(&self) -> Validation {
        self.validation
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.vertices[i]
    }

    pub fn vertices(&self) -> impl Iterator<Item = &[f64]> {
        self.vertices.iter().map(|v| v.as_slice())
    }

    pub fn vertices_vec(&self) -> Vec<Vec<f64>> {
        self.vertices.clone()
    }

    /// Vertices re-projected onto the sphere.
    pub fn unit_vertices(&self) -> Vec<UnitVector> {
        self.vertices
            .iter()
            .map(|v| project(v).unwrap_or_else(|_| UnitVector::from_normalized(v.clone())))
            .collect()
    }

    /// Support function `h(x) = max_i x . v_i`.
    #[inline]
    pub fn support(&self, x: &[f64]) -> f64 {
        self.assign(x).1
    }

    /// Index of the spherical image containing `x`; ties go to the lowest
    /// index.
    #[inline]
    pub fn voronoi_assign(&self, x: &[f64]) -> usize {
        self.assign(x).0
    }

    /// `(argmax_i x . v_i, max_i x . v_i)` in a single pass.
    #[inline]
    pub fn assign(&self, x: &[f64]) -> (usize, f64) {
        let mut best = 0;
        let mut best_val = dot(x, &self.vertices[0]);
        for (i, v) in self.vertices.iter().enumerate().skip(1) {
            let val = dot(x, v);
            if val > best_val {
                best = i;
                best_val = val;
            }
        }
        (best, best_val)
    }

    pub fn covers_sphere(&self) -> Result<bool> {
        let refs: Vec<&[f64]> = self.vertices().collect();
        sphere::covers_sphere_raw(&refs)
    }

    /// `C_i`: the circumcenter of the face opposite `v_i`, projected onto
    /// the sphere.
    pub fn circumcenters(&self) -> Result<Vec<UnitVector>> {
        (0..self.n_vertices())
            .map(|i| {
                let face: Vec<&[f64]> =
                    self.vertices().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v).collect();
                let c = sphere::affine_circumcenter(&face);
                if sphere::norm(&c) < FACE_ORIGIN_TOLERANCE {
                    return Err(Error::DegenerateFace { face: i });
                }
                project(&c)
            })
            .collect()
    }

    pub fn gram(&self) -> GramSignature {
        let m = self.n_vertices();
        let gram = (0..m)
            .map(|i| (0..m).map(|j| dot(&self.vertices[i], &self.vertices[j])).collect())
            .collect();
        GramSignature { gram }
    }

    /// Frobenius distance between the vertex Gram matrix and that of the
    /// inscribed regular simplex (unit diagonal, off-diagonals `-1/d`).
    pub fn regularity_distance(&self) -> f64 {
        self.gram().distance_to_regular(self.dim())
    }

    /// Applies a linear map (an orthogonal matrix, in practice) to every
    /// vertex.
    pub fn transformed(&self, q: &DMatrix<f64>) -> Result<Self> {
        let vertices: Vec<Vec<f64>> = self
            .vertices
            .iter()
            .map(|v| (q * DVector::from_column_slice(v)).iter().copied().collect())
            .collect();
        match self.validation {
            Validation::Strict => Self::new(vertices.iter().map(|v| project(v)).collect::<Result<_>>()?),
            Validation::Relaxed => Self::relaxed(vertices),
        }
    }

    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let vertices = perm.iter().map(|&i| self.vertices[i].clone()).collect();
        Self::from_raw(vertices, self.validation)
    }
}

/// Gram matrix of pairwise vertex dot products.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramSignature {
    pub gram: Vec<Vec<f64>>,
}

impl GramSignature {
    pub fn distance_to_regular(&self, dim: usize) -> f64 {
        let off = -1.0 / dim as f64;
        let mut acc = 0.0;
        for (i, row) in self.gram.iter().enumerate() {
            for (j, &g) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { off };
                acc += (g - target) * (g - target);
            }
        }
        acc.sqrt()
    }
}

/// `max_i x . v_i`.
pub fn support(simplex: &EuclideanSimplex, x: &UnitVector) -> f64 {
    simplex.support(x.as_slice())
}

pub fn voronoi_assign(simplex: &EuclideanSimplex, x: &UnitVector) -> usize {
    simplex.voronoi_assign(x.as_slice())
}

pub fn circumcenters(simplex: &EuclideanSimplex) -> Result<Vec<UnitVector>> {
    simplex.circumcenters()
}

pub fn regularity_distance(simplex: &EuclideanSimplex) -> f64 {
    simplex.regularity_distance()
}

/// The spherical simplex `S^{d-1} ∩ cone(g_1, ..., g_d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalSimplex {
    generators: Vec<UnitVector>,
    // row-major inverse of the generator matrix (generators as columns)
    inverse: Vec<f64>,
}

impl SphericalSimplex {
    pub fn new(generators: Vec<UnitVector>) -> Result<Self> {
        let d = generators.first().map_or(0, |g| g.dim());
        if d < 3 {
            return Err(Error::DimensionTooSmall { dim: d });
        }
        if generators.len() != d {
            return Err(Error::VertexCount { expected: d, found: generators.len() });
        }
        if let Some(g) = generators.iter().find(|g| g.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: g.dim() });
        }
        let m = DMatrix::from_fn(d, d, |r, c| generators[c][r]);
        let sigma = m.singular_values().min();
        if sigma < DEPENDENCE_TOLERANCE {
            return Err(Error::SingularGenerators { sigma });
        }
        let inv = m.try_inverse().ok_or(Error::SingularGenerators { sigma })?;
        let inverse = (0..d).flat_map(|r| (0..d).map(move |c| (r, c))).map(|(r, c)| inv[(r, c)]).collect();
        Ok(Self { generators, inverse })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| project(r)).collect::<Result<_>>()?)
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[UnitVector] {
        &self.generators
    }

    /// Coefficients `c` with `sum_j c_j g_j = x`.
    pub fn cone_coordinates(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|r| dot(&self.inverse[r * d..(r + 1) * d], x)).collect()
    }

    /// Membership of any nonzero vector's direction (the test is
    /// scale-invariant).
    #[inline]
    pub fn contains_raw(&self, x: &[f64]) -> bool {
        let d = self.dim();
        (0..d).all(|r| dot(&self.inverse[r * d..(r + 1) * d], x) >= -CONE_TOLERANCE)
    }

    pub fn contains(&self, x: &UnitVector) -> bool {
        self.contains_raw(x.as_slice())
    }
}

pub fn spherical_simplex_contains(ss: &SphericalSimplex, x: &UnitVector) -> bool {
    ss.contains(x)
}

/// Haar-random orthogonal matrix (QR of a Gaussian matrix, sign-corrected).
pub fn random_orthogonal(dim: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::<f64>::from_fn(dim, dim, |_, _| StandardNormal.sample(&mut rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            for i in 0..dim {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}
