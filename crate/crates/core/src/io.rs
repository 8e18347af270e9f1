//! Simplex files and JSON-lines output.
//!
//! A Euclidean simplex file is `{"dim": d, "vertices": [[f64; d]; d+1]}`.
//! A spherical simplex file is `{"dim": d, "generators": [[f64; d]; d]}`;
//! generators are normalized on read.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{EuclideanSimplex, SimplexRecord, SphericalSimplex, Validation};
use crate::sphere::{norm, project, UnitVector};

/// Vertices read from a file may deviate from unit norm by this much; they
/// are re-projected before use.
pub const FILE_UNIT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReadOptions {
    /// Project every vertex onto the sphere instead of rejecting non-unit ones.
    pub normalize: bool,
    /// Accept any vertex list (points, segments, scaled bodies).
    pub test_mode: bool,
}

pub fn parse_simplex(text: &str, options: ReadOptions) -> Result<EuclideanSimplex> {
    let record: SimplexRecord = serde_json::from_str(text)?;
    simplex_from_record(record, options)
}

pub fn simplex_from_record(record: SimplexRecord, options: ReadOptions) -> Result<EuclideanSimplex> {
    if let Some(v) = record.vertices.iter().find(|v| v.len() != record.dim) {
        return Err(Error::DimensionMismatch { expected: record.dim, found: v.len() });
    }
    if options.test_mode || record.relaxed {
        let vertices = if options.normalize {
            record.vertices.iter().map(|v| project(v).map(UnitVector::into_inner)).collect::<Result<_>>()?
        } else {
            record.vertices
        };
        return EuclideanSimplex::from_raw(vertices, Validation::Relaxed);
    }
    let vertices = record
        .vertices
        .iter()
        .map(|v| {
            let n = norm(v);
            if !options.normalize && !((n - 1.0).abs() <= FILE_UNIT_TOLERANCE) {
                return Err(Error::NotUnit { norm: n });
            }
            if (n - 1.0).abs() <= crate::sphere::UNIT_TOLERANCE {
                UnitVector::new(v.clone())
            } else {
                project(v)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    EuclideanSimplex::new(vertices)
}

pub fn read_simplex(path: impl AsRef<Path>, options: ReadOptions) -> Result<EuclideanSimplex> {
    parse_simplex(&std::fs::read_to_string(path)?, options)
}

pub fn simplex_to_json(simplex: &EuclideanSimplex) -> Result<String> {
    Ok(serde_json::to_string_pretty(simplex)?)
}

pub fn write_simplex(path: impl AsRef<Path>, simplex: &EuclideanSimplex) -> Result<()> {
    let mut text = simplex_to_json(simplex)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalSimplexRecord {
    pub dim: usize,
    pub generators: Vec<Vec<f64>>,
}

pub fn parse_spherical_simplex(text: &str) -> Result<SphericalSimplex> {
    let record: SphericalSimplexRecord = serde_json::from_str(text)?;
    if record.generators.len() != record.dim {
        return Err(Error::VertexCount { expected: record.dim, found: record.generators.len() });
    }
    if let Some(g) = record.generators.iter().find(|g| g.len() != record.dim) {
        return Err(Error::DimensionMismatch { expected: record.dim, found: g.len() });
    }
    SphericalSimplex::from_rows(&record.generators)
}

pub fn read_spherical_simplex(path: impl AsRef<Path>) -> Result<SphericalSimplex> {
    parse_spherical_simplex(&std::fs::read_to_string(path)?)
}

pub fn spherical_simplex_record(ss: &SphericalSimplex) -> SphericalSimplexRecord {
    SphericalSimplexRecord {
        dim: ss.dim(),
        generators: ss.generators().iter().map(|g| g.as_slice().to_vec()).collect(),
    }
}

/// Writes `value` as one line of JSON.
pub fn write_json_line<W: Write, T: Serialize>(out: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}
