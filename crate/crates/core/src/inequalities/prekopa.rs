//! Grid verification of the spherical Prékopa–Leindler inequality on
//! `S^{d-2}` for the circle (`d = 3`) and the 2-sphere (`d = 4`).

use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{angle_between, dot, norm, UnitVector};

/// Pairs closer than this to antipodal have no unique geodesic.
pub const ANTIPODAL_MARGIN: f64 = 1e-9;

/// `sin(θ)/θ`, with the removable singularity filled in.
pub fn sinc(theta: f64) -> f64 {
    if theta.abs() < 1e-4 {
        let t2 = theta * theta;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        theta.sin() / theta
    }
}

/// `C = cos(θ/2) = sinc(θ)/sinc(θ/2)`; the weight in the hypothesis at
/// `λ = 1/2` is `C^{d-3}`.
pub fn pl_constant(theta: f64, _dim: usize) -> Result<f64> {
    if !(theta >= 0.0) {
        return Err(Error::InvalidParameter(format!("angle {theta} must be nonnegative")));
    }
    if theta >= PI - ANTIPODAL_MARGIN {
        return Err(Error::AntipodalPoints);
    }
    Ok((theta / 2.0).cos())
}

/// `C^{d-3}`.
pub fn pl_weight(theta: f64, dim: usize) -> Result<f64> {
    Ok(pl_constant(theta, dim)?.powi(dim as i32 - 3))
}

/// `((1 + Q_1 . Q_3)/2)^{(d-3)/2}`, the same weight written through the dot
/// product of the two points.
pub fn pl_weight_from_dot(q1_dot_q3: f64, dim: usize) -> Result<f64> {
    if q1_dot_q3 <= -1.0 + ANTIPODAL_MARGIN {
        return Err(Error::AntipodalPoints);
    }
    Ok(((1.0 + q1_dot_q3.min(1.0)) / 2.0).powf((dim as f64 - 3.0) / 2.0))
}

/// `π(Q_1 sin(λθ) + Q_3 sin((1-λ)θ))` for unit vectors of any dimension.
/// This point sits a fraction `1-λ` of the way from `Q_1` to `Q_3`.
pub fn geodesic_combine_raw(q1: &[f64], q3: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if q1.len() != q3.len() {
        return Err(Error::DimensionMismatch { expected: q1.len(), found: q3.len() });
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("lambda {lambda} outside [0, 1]")));
    }
    if dot(q1, q3) <= -1.0 + ANTIPODAL_MARGIN {
        return Err(Error::AntipodalPoints);
    }
    let theta = angle_between(q1, q3);
    if theta == 0.0 {
        return Ok(q1.to_vec());
    }
    let (w1, w3) = ((lambda * theta).sin(), ((1.0 - lambda) * theta).sin());
    let mut q2: Vec<f64> = q1.iter().zip(q3).map(|(a, b)| w1 * a + w3 * b).collect();
    let n = norm(&q2);
    q2.iter_mut().for_each(|v| *v /= n);
    Ok(q2)
}

pub fn geodesic_combine(q1: &UnitVector, q3: &UnitVector, lambda: f64) -> Result<UnitVector> {
    geodesic_combine_raw(q1.as_slice(), q3.as_slice(), lambda).map(UnitVector::from_normalized)
}

/// A quadrature grid on `S^{d-2}` with weights summing to 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SphereGrid {
    /// `nodes` equally spaced points `φ_k = 2πk/nodes` on the circle.
    Circle { nodes: usize },
    /// Latitude–longitude cells on `S^2`: `n_lat` colatitude bands and
    /// `2 n_lat` longitudes, one node at the centre of each cell, weighted
    /// by the cell's exact area.
    Sphere { n_lat: usize },
}

impl SphereGrid {
    pub fn circle(nodes: usize) -> Result<Self> {
        if nodes < 4 || !nodes.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("circle grid size {nodes} must be a power of two >= 4")));
        }
        Ok(SphereGrid::Circle { nodes })
    }

    pub fn sphere(n_lat: usize) -> Result<Self> {
        if n_lat < 2 || !n_lat.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("sphere grid size {n_lat} must be a power of two >= 2")));
        }
        Ok(SphereGrid::Sphere { n_lat })
    }

    /// The ambient dimension `d` of the statement (the grid lives on `S^{d-2}`).
    pub fn ambient_dim(&self) -> usize {
        match self {
            SphereGrid::Circle { .. } => 3,
            SphereGrid::Sphere { .. } => 4,
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            SphereGrid::Circle { nodes } => nodes,
            SphereGrid::Sphere { n_lat } => 2 * n_lat * n_lat,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Angles of node `k`: `[φ]` on the circle, `[colatitude, longitude]` on the sphere.
    pub fn angles(&self, k: usize) -> Vec<f64> {
        match *self {
            SphereGrid::Circle { nodes } => vec![2.0 * PI * k as f64 / nodes as f64],
            SphereGrid::Sphere { n_lat } => {
                let (i, j) = (k / (2 * n_lat), k % (2 * n_lat));
                let h = PI / n_lat as f64;
                vec![(i as f64 + 0.5) * h, (j as f64 + 0.5) * h]
            }
        }
    }

    /// Cartesian coordinates of node `k`.
    pub fn point(&self, k: usize) -> Vec<f64> {
        let a = self.angles(k);
        match self {
            SphereGrid::Circle { .. } => vec![a[0].cos(), a[0].sin()],
            SphereGrid::Sphere { .. } => {
                let (st, ct) = a[0].sin_cos();
                vec![st * a[1].cos(), st * a[1].sin(), ct]
            }
        }
    }

    pub fn weight(&self, k: usize) -> f64 {
        match *self {
            SphereGrid::Circle { nodes } => 1.0 / nodes as f64,
            SphereGrid::Sphere { n_lat } => {
                let i = k / (2 * n_lat);
                let h = PI / n_lat as f64;
                ((i as f64 * h).cos() - ((i + 1) as f64 * h).cos()) / 2.0 / (2 * n_lat) as f64
            }
        }
    }

    /// Index of the node nearest to the unit vector `p`.
    pub fn nearest(&self, p: &[f64]) -> usize {
        match *self {
            SphereGrid::Circle { nodes } => {
                let phi = p[1].atan2(p[0]).rem_euclid(2.0 * PI);
                ((phi / (2.0 * PI) * nodes as f64).round() as usize) % nodes
            }
            SphereGrid::Sphere { n_lat } => {
                let h = PI / n_lat as f64;
                let n_lon = 2 * n_lat;
                let theta = p[2].clamp(-1.0, 1.0).acos();
                let phi = p[1].atan2(p[0]).rem_euclid(2.0 * PI);
                let i = ((theta / h) as usize).min(n_lat - 1);
                let j = ((phi / h) as usize).min(n_lon - 1);
                let mut best = (f64::NEG_INFINITY, 0);
                for di in -1i64..=1 {
                    let ii = i as i64 + di;
                    if ii < 0 || ii >= n_lat as i64 {
                        continue;
                    }
                    for dj in -1i64..=1 {
                        let jj = (j as i64 + dj).rem_euclid(n_lon as i64) as usize;
                        let k = ii as usize * n_lon + jj;
                        let c = dot(p, &self.point(k));
                        if c > best.0 {
                            best = (c, k);
                        }
                    }
                }
                best.1
            }
        }
    }
}

/// A nonnegative function sampled on a [`SphereGrid`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereFunction {
    grid: SphereGrid,
    values: Vec<f64>,
}

impl SphereFunction {
    pub fn new(grid: SphereGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "grid has {} nodes but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("sphere function value {v} is not a finite nonnegative number")));
        }
        Ok(Self { grid, values })
    }

    /// Evaluates `f` at the Cartesian coordinates of every node.
    pub fn from_fn(grid: SphereGrid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|k| f(&grid.point(k))).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> SphereGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `∫ f dμ` against the normalized measure, by grid quadrature.
    pub fn integral(&self) -> f64 {
        self.values.iter().enumerate().map(|(k, v)| v * self.grid.weight(k)).sum()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|v| v * c).collect())
    }

    /// Writes `phi,value` (circle) or `theta,phi,value` (sphere) rows.
    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        match self.grid {
            SphereGrid::Circle { .. } => w.write_record(["phi", "value"])?,
            SphereGrid::Sphere { .. } => w.write_record(["theta", "phi", "value"])?,
        }
        for (k, v) in self.values.iter().enumerate() {
            let mut row: Vec<String> = self.grid.angles(k).iter().map(|a| format!("{a:.17e}")).collect();
            row.push(format!("{v:.17e}"));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the format written by [`SphereFunction::save_csv`]; rows must
    /// list the grid nodes in order.
    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let width = r.headers()?.len();
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::InvalidParameter(format!("bad number in sphere function CSV: {e}")))?;
            if row.len() != width {
                return Err(Error::InvalidParameter("ragged sphere function CSV".into()));
            }
            rows.push(row);
        }
        let grid = match width {
            2 => SphereGrid::circle(rows.len())?,
            3 => {
                let n_lat = ((rows.len() / 2) as f64).sqrt().round() as usize;
                if 2 * n_lat * n_lat != rows.len() {
                    return Err(Error::GridMismatch);
                }
                SphereGrid::sphere(n_lat)?
            }
            _ => return Err(Error::InvalidParameter(format!("sphere function CSV has {width} columns"))),
        };
        for (k, row) in rows.iter().enumerate() {
            let expected = grid.angles(k);
            if expected.iter().zip(row).any(|(e, a)| (e - a).abs() > 1e-9) {
                return Err(Error::GridMismatch);
            }
        }
        Self::new(grid, rows.into_iter().map(|r| r[width - 1]).collect())
    }
}

/// Outcome of [`spl_verify`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlReport {
    /// `∫ h dμ` for the smallest admissible `h` on the grid.
    pub lhs: f64,
    /// `(∫ f)^{1-λ} (∫ g)^λ`.
    pub rhs: f64,
    pub holds: bool,
    /// `∫ f` or `∫ g` vanished, so the inequality holds trivially.
    pub empty_support: bool,
    /// The constructed `h` at every node.
    #[serde(skip)]
    pub envelope: Vec<f64>,
}

/// Hypothesis right-hand side for a pair at angle `θ`, without the values:
/// `sinc^e(θ) / (sinc^{e(1-λ)}((1-λ)θ) sinc^{eλ}(λθ))` with `e = d - 3`.
fn pair_factor(theta: f64, lambda: f64, e: i32) -> f64 {
    if e == 0 {
        return 1.0;
    }
    let e = e as f64;
    sinc(theta).powf(e) / (sinc((1.0 - lambda) * theta).powf(e * (1.0 - lambda)) * sinc(lambda * theta).powf(e * lambda))
}

/// Builds the smallest `h` satisfying the hypothesis on every non-antipodal
/// grid pair `(Q_1, Q_3)` in the supports of `f` and `g` (with `Q_2`
/// snapped to its nearest node), integrates it, and compares against
/// `(∫f)^{1-λ}(∫g)^λ` with relative slack.
pub fn spl_verify(f: &SphereFunction, g: &SphereFunction, lambda: f64, slack: f64) -> Result<PlReport> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch);
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter(format!("lambda {lambda} outside (0, 1)")));
    }
    if !(slack >= 0.0) {
        return Err(Error::InvalidParameter(format!("slack {slack} must be nonnegative")));
    }
    let grid = f.grid;
    let (int_f, int_g) = (f.integral(), g.integral());
    if int_f == 0.0 || int_g == 0.0 {
        return Ok(PlReport { lhs: 0.0, rhs: 0.0, holds: true, empty_support: true, envelope: vec![0.0; grid.len()] });
    }
    let rhs = int_f.powf(1.0 - lambda) * int_g.powf(lambda);
    let e = grid.ambient_dim() as i32 - 3;
    let fp: Vec<f64> = f.values.iter().map(|v| v.powf(1.0 - lambda)).collect();
    let gp: Vec<f64> = g.values.iter().map(|v| v.powf(lambda)).collect();
    let n = grid.len();

    let envelope = match grid {
        SphereGrid::Circle { nodes } => {
            // θ and the snapped midpoint depend only on the index offset
            let offsets: Vec<Option<(usize, f64)>> = (0..nodes)
                .map(|m| {
                    let signed = if m <= nodes / 2 { m as f64 } else { m as f64 - nodes as f64 };
                    let theta = 2.0 * PI * signed.abs() / nodes as f64;
                    if theta >= PI - ANTIPODAL_MARGIN {
                        return None;
                    }
                    let step = ((1.0 - lambda) * signed).round() as i64;
                    Some((step.rem_euclid(nodes as i64) as usize, pair_factor(theta, lambda, e)))
                })
                .collect();
            envelope_by_rows(n, |i, h| {
                if fp[i] == 0.0 {
                    return;
                }
                for (m, off) in offsets.iter().enumerate() {
                    if let Some((step, factor)) = off {
                        let j = (i + m) % nodes;
                        if gp[j] == 0.0 {
                            continue;
                        }
                        let k = (i + step) % nodes;
                        let v = fp[i] * gp[j] * factor;
                        if v > h[k] {
                            h[k] = v;
                        }
                    }
                }
            })
        }
        SphereGrid::Sphere { .. } => {
            let points: Vec<Vec<f64>> = (0..n).map(|k| grid.point(k)).collect();
            envelope_by_rows(n, |i, h| {
                if fp[i] == 0.0 {
                    return;
                }
                for j in 0..n {
                    if gp[j] == 0.0 {
                        continue;
                    }
                    let q2 = match geodesic_combine_raw(&points[i], &points[j], lambda) {
                        Ok(q) => q,
                        Err(_) => continue,
                    };
                    let theta = angle_between(&points[i], &points[j]);
                    if theta >= PI - ANTIPODAL_MARGIN {
                        continue;
                    }
                    let k = grid.nearest(&q2);
                    let v = fp[i] * gp[j] * pair_factor(theta, lambda, e);
                    if v > h[k] {
                        h[k] = v;
                    }
                }
            })
        }
    };
    let lhs: f64 = envelope.iter().enumerate().map(|(k, v)| v * grid.weight(k)).sum();
    Ok(PlReport { lhs, rhs, holds: lhs >= rhs * (1.0 - slack), empty_support: false, envelope })
}

/// Runs `visit(i, h)` for every row `i` in parallel and combines the partial
/// envelopes by pointwise maximum, which is exact and order-independent.
fn envelope_by_rows(n: usize, visit: impl Fn(usize, &mut [f64]) + Sync) -> Vec<f64> {
    (0..n)
        .into_par_iter()
        .fold(
            || vec![0.0; n],
            |mut h, i| {
                visit(i, &mut h);
                h
            },
        )
        .reduce(
            || vec![0.0; n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x = x.max(y);
                }
                a
            },
        )
}
