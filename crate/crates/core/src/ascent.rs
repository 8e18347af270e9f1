//! Centroid ascent: replace every vertex by the spherical centroid of its
//! spherical image and repeat. Each step does not decrease the mean width,
//! because switching to the Voronoi partition and then moving every vertex
//! to its cell centroid can only increase `Σ ∫_{R_i} x . v_i`.
//!
//! The two switching inequalities are exposed as verifiers evaluated on a
//! shared sample stream, together with the necessary conditions every
//! maximizer satisfies.

use serde::{Deserialize, Serialize};

use crate::centroid::{Region, RESULTANT_TOLERANCE};
use crate::error::{Error, Result};
use crate::estimate::ExactSum;
use crate::meanwidth::{cell_pass, MeanWidthReport};
use crate::simplex::EuclideanSimplex;
use crate::sphere::{
    angle_between, derive_seed, dot, min_enclosing_ball, norm, project, Ball, SampleStream, SamplerKind,
    UnitVector,
};

/// Cells with fewer samples than this have no meaningful centroid.
pub const MIN_CELL_SAMPLES: u64 = 10;

/// One centroid step with its diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LloydStep {
    /// The simplex formed by the cell centroids, in vertex order.
    pub next: EuclideanSimplex,
    /// Mean width of the input simplex, from the same pass.
    pub report: MeanWidthReport,
    /// Angle between each vertex and its cell centroid.
    pub movements: Vec<f64>,
    /// Standard error of each centroid direction, in radians.
    pub angular_std_errors: Vec<f64>,
}

impl LloydStep {
    pub fn max_movement(&self) -> f64 {
        self.movements.iter().copied().fold(0.0, f64::max)
    }
}

/// One step with i.i.d. samples.
pub fn lloyd_step(simplex: &EuclideanSimplex, n: u64, seed: u64) -> Result<EuclideanSimplex> {
    Ok(lloyd_step_with(simplex, &SampleStream::iid(simplex.dim(), n, seed)?)?.next)
}

pub fn lloyd_step_with(simplex: &EuclideanSimplex, stream: &SampleStream) -> Result<LloydStep> {
    if !simplex.covers_sphere()? {
        return Err(Error::NotCovering);
    }
    let pass = cell_pass(simplex, stream)?;
    let d = simplex.dim();
    let n = pass.report.total.n_samples.max(1) as f64;
    let mut centroids = Vec::with_capacity(d + 1);
    let mut movements = Vec::with_capacity(d + 1);
    let mut angular = Vec::with_capacity(d + 1);
    for (i, res) in pass.resultants.iter().enumerate() {
        let count = pass.report.cell_counts[i];
        if count < MIN_CELL_SAMPLES {
            return Err(Error::EmptyCell { cell: i, count });
        }
        let m: Vec<f64> = res.iter().map(|s| s.value() / n).collect();
        let r = norm(&m);
        if !(r >= RESULTANT_TOLERANCE) {
            return Err(Error::UndefinedCentroid { norm: r });
        }
        let g = project(&m)?;
        movements.push(angle_between(simplex.vertex(i), g.as_slice()));
        angular.push(angular_std_error(&pass.second_moments[i], count, &m, g.as_slice(), n));
        centroids.push(g);
    }
    Ok(LloydStep { next: EuclideanSimplex::new(centroids)?, report: pass.report, movements, angular_std_errors: angular })
}

/// Standard error of `π(m)` where `m` is the mean of `y = x 1_V`: the
/// tangential variance of `y` is `E[1_V] - g^T E[x x^T 1_V] g`.
fn angular_std_error(second: &[ExactSum], count: u64, m: &[f64], g: &[f64], n: f64) -> f64 {
    let d = g.len();
    let mut quad = 0.0;
    let mut idx = 0;
    for a in 0..d {
        for b in a..d {
            let w = if a == b { 1.0 } else { 2.0 };
            quad += w * g[a] * g[b] * second[idx].value();
            idx += 1;
        }
    }
    let tangential = (count as f64 - quad) / n;
    (tangential.max(0.0) / n).sqrt() / norm(m)
}

/// Parameters of [`ascend_with`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AscentOptions {
    /// Stop once every vertex moves less than this angle.
    pub tol: f64,
    pub max_iters: usize,
    pub n_samples: u64,
    pub seed: u64,
    /// Iteration `k` integrates a fresh stream seeded with
    /// `derive_seed(seed, k)` of this kind.
    pub sampler: SamplerKind,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self { tol: 1e-3, max_iters: 500, n_samples: 1_000_000, seed: 0, sampler: SamplerKind::ScrambledSobol }
    }
}

/// One evaluated iterate of a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AscentStep {
    pub iteration: usize,
    pub simplex: EuclideanSimplex,
    pub report: MeanWidthReport,
    pub regularity_distance: f64,
    /// Largest angle between a vertex and its cell centroid.
    pub movement: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AscentTrajectory {
    pub steps: Vec<AscentStep>,
    pub converged: bool,
    pub iterations: usize,
    pub options: AscentOptions,
}

impl AscentTrajectory {
    pub fn final_step(&self) -> &AscentStep {
        self.steps.last().expect("a trajectory has at least one step")
    }

    pub fn final_simplex(&self) -> &EuclideanSimplex {
        &self.final_step().simplex
    }

    pub fn final_regularity_distance(&self) -> f64 {
        self.final_step().regularity_distance
    }

    /// Steps whose mean width drops by more than `k` combined standard
    /// errors relative to the previous step.
    pub fn monotonicity_violations(&self, k: f64) -> Vec<usize> {
        self.steps
            .windows(2)
            .filter(|w| {
                let (a, b) = (&w[0].report.total, &w[1].report.total);
                b.value < a.value - k * a.combined_std_error(b)
            })
            .map(|w| w[1].iteration)
            .collect()
    }
}

pub fn ascend(simplex: &EuclideanSimplex, tol: f64, max_iters: usize, n: u64, seed: u64) -> Result<AscentTrajectory> {
    ascend_with(simplex, &AscentOptions { tol, max_iters, n_samples: n, seed, ..Default::default() })
}

/// Iterates centroid steps until the largest vertex movement drops below
/// `tol` or `max_iters` simplexes have been evaluated. Running out of
/// iterations is reported through `converged`, not as an error.
pub fn ascend_with(simplex: &EuclideanSimplex, options: &AscentOptions) -> Result<AscentTrajectory> {
    if !(options.tol > 0.0) || options.max_iters == 0 {
        return Err(Error::InvalidParameter("tol and max_iters must be positive".into()));
    }
    let mut current = simplex.clone();
    let mut steps = Vec::new();
    let mut converged = false;
    for k in 0..options.max_iters {
        let stream = SampleStream::new(
            current.dim(),
            options.n_samples,
            derive_seed(options.seed, k as u64),
            options.sampler,
        )?;
        let step = lloyd_step_with(&current, &stream)?;
        let movement = step.max_movement();
        steps.push(AscentStep {
            iteration: k + 1,
            regularity_distance: current.regularity_distance(),
            simplex: current,
            report: step.report,
            movement,
        });
        if movement < options.tol {
            converged = true;
            break;
        }
        current = step.next;
    }
    Ok(AscentTrajectory { iterations: steps.len(), steps, converged, options: *options })
}

/// Both sides of a switching inequality evaluated on one sample stream.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwitchCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub const SWITCH_TOLERANCE: f64 = 1e-12;

/// `Σ_i ∫_{R_i} x . v_i dμ <= Σ_i ∫_{V_i} x . v_i dμ` for the partition
/// `R_i = {x : assignment(x) = i}`.
pub fn verify_switch_region<A>(simplex: &EuclideanSimplex, assignment: A, n: u64, seed: u64) -> Result<SwitchCheck>
where
    A: Fn(&[f64]) -> usize + Sync,
{
    verify_switch_region_with(simplex, assignment, &SampleStream::iid(simplex.dim(), n, seed)?)
}

pub fn verify_switch_region_with<A>(simplex: &EuclideanSimplex, assignment: A, stream: &SampleStream) -> Result<SwitchCheck>
where
    A: Fn(&[f64]) -> usize + Sync,
{
    if stream.dim != simplex.dim() {
        return Err(Error::DimensionMismatch { expected: simplex.dim(), found: stream.dim });
    }
    let k = simplex.n_vertices();
    let (lhs, rhs, bad) = stream.fold(
        || (ExactSum::default(), ExactSum::default(), None::<usize>),
        |(l, r, bad), x| {
            let i = assignment(x);
            if i >= k {
                bad.get_or_insert(i);
                return;
            }
            l.add(dot(x, simplex.vertex(i)));
            r.add(simplex.assign(x).1);
        },
        |a, b| {
            a.0.merge(b.0);
            a.1.merge(b.1);
            if a.2.is_none() {
                a.2 = b.2;
            }
        },
    );
    if let Some(i) = bad {
        return Err(Error::InvalidParameter(format!("partition label {i} out of range for {k} vertices")));
    }
    let n = stream.n_samples as f64;
    let (lhs, rhs) = (lhs.value() / n, rhs.value() / n);
    Ok(SwitchCheck { lhs, rhs, holds: lhs <= rhs + SWITCH_TOLERANCE })
}

/// `∫_R x . X dμ <= ∫_R x . G(R) dμ`, with `G(R)` the empirical centroid
/// of the same samples.
pub fn verify_switch_point(region: &Region, x: &UnitVector, n: u64, seed: u64) -> Result<SwitchCheck> {
    verify_switch_point_with(region, x, &SampleStream::iid(x.dim(), n, seed)?)
}

pub fn verify_switch_point_with(region: &Region, point: &UnitVector, stream: &SampleStream) -> Result<SwitchCheck> {
    let d = point.dim();
    if stream.dim != d {
        return Err(Error::DimensionMismatch { expected: d, found: stream.dim });
    }
    let (sums, count) = stream.fold(
        || (vec![ExactSum::default(); d], 0u64),
        |(s, c), x| {
            if region.contains_raw(x) {
                for (si, xi) in s.iter_mut().zip(x) {
                    si.add(*xi);
                }
                *c += 1;
            }
        },
        |a, b| {
            for (p, q) in a.0.iter_mut().zip(b.0) {
                p.merge(q);
            }
            a.1 += b.1;
        },
    );
    if count == 0 {
        return Err(Error::EmptyRegion);
    }
    let n = stream.n_samples as f64;
    let resultant: Vec<f64> = sums.iter().map(|s| s.value() / n).collect();
    let r = norm(&resultant);
    if !(r >= RESULTANT_TOLERANCE) {
        return Err(Error::UndefinedCentroid { norm: r });
    }
    let g = project(&resultant)?;
    let lhs = dot(&resultant, point.as_slice());
    let rhs = dot(&resultant, g.as_slice());
    Ok(SwitchCheck { lhs, rhs, holds: lhs <= rhs + SWITCH_TOLERANCE })
}

/// The necessary conditions on a mean-width maximizer: its smallest
/// enclosing ball is the unit ball, its vertices are unit vectors, and the
/// closed hemispheres around its vertices cover the sphere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NecessaryConditions {
    pub unit_enclosing_ball: bool,
    pub unit_vertices: bool,
    pub covers_sphere: bool,
    pub enclosing_ball: Ball,
}

impl NecessaryConditions {
    pub fn all(&self) -> bool {
        self.unit_enclosing_ball && self.unit_vertices && self.covers_sphere
    }
}

pub const ENCLOSING_BALL_TOLERANCE: f64 = 1e-6;

pub fn check_necessary_conditions(simplex: &EuclideanSimplex) -> Result<NecessaryConditions> {
    let ball = min_enclosing_ball(&simplex.vertices_vec())?;
    let unit_enclosing_ball =
        norm(&ball.center) < ENCLOSING_BALL_TOLERANCE && (ball.radius - 1.0).abs() < ENCLOSING_BALL_TOLERANCE;
    let unit_vertices = simplex.vertices().all(|v| (norm(v) - 1.0).abs() <= crate::sphere::UNIT_TOLERANCE);
    let covers_sphere = simplex.dim() >= 2
        && simplex.n_vertices() == simplex.dim() + 1
        && simplex.covers_sphere().unwrap_or(false);
    Ok(NecessaryConditions { unit_enclosing_ball, unit_vertices, covers_sphere, enclosing_ball: ball })
}
