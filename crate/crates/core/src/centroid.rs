//! Spherical centroids `G(R) = π(∫_R x dμ)`, longitudinal strips
//! `R_I = {x ∈ R : x_2/x_1 ∈ I}`, and the strip-ratio and
//! centroid-uniqueness experiments.
//!
//! Regions are indicator predicates integrated against a shared
//! [`SampleStream`], so quantities computed in the same pass are correlated
//! and their differences and ratios carry delta-method standard errors
//! built from the full sample covariance.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{delta_method_std_error, MomentMatrix, MonteCarloEstimate};
use crate::shear::ShearMap;
use crate::simplex::{EuclideanSimplex, SphericalSimplex};
use crate::sphere::{norm, project, SampleStream, UnitVector};

/// Resultant norms below this leave the centroid undefined.
pub const RESULTANT_TOLERANCE: f64 = 1e-6;
/// Samples with `x_1` at or below this are dropped from strips.
pub const STRIP_X1_FLOOR: f64 = 1e-12;
/// Accepted samples of a hemisphere-safe region satisfy `x_1 >= -HEMISPHERE_SLACK`.
pub const HEMISPHERE_SLACK: f64 = 1e-12;

type Membership = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A measurable subset of the sphere given by its indicator function.
#[derive(Clone)]
pub struct Region {
    membership: Membership,
    pub label: String,
    /// The region is asserted to lie in the closed hemisphere `x_1 >= 0`.
    pub hemisphere_safe: bool,
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Region")
            .field("label", &self.label)
            .field("hemisphere_safe", &self.hemisphere_safe)
            .finish_non_exhaustive()
    }
}

impl Region {
    pub fn new(
        label: impl Into<String>,
        hemisphere_safe: bool,
        membership: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
    ) -> Self {
        Self { membership: Arc::new(membership), label: label.into(), hemisphere_safe }
    }

    #[inline]
    pub fn contains_raw(&self, x: &[f64]) -> bool {
        (self.membership)(x)
    }

    pub fn contains(&self, x: &UnitVector) -> bool {
        self.contains_raw(x.as_slice())
    }

    pub fn whole_sphere() -> Self {
        Self::new("sphere", false, |_| true)
    }

    /// The closed hemisphere `x_1 >= 0`.
    pub fn hemisphere() -> Self {
        Self::new("hemisphere x_1 >= 0", true, |x| x[0] >= 0.0)
    }

    /// The cap `{x : x . center >= height}`.
    pub fn cap(center: &UnitVector, height: f64) -> Self {
        let c = center.as_slice().to_vec();
        let reach = center[0].clamp(-1.0, 1.0).acos() + height.clamp(-1.0, 1.0).acos();
        let safe = reach <= std::f64::consts::FRAC_PI_2;
        Self::new(format!("cap h={height}"), safe, move |x| crate::sphere::dot(x, &c) >= height)
    }

    /// The spherical simplex spanned by `ss`; hemisphere-safe when every
    /// generator has `x_1 >= 0`, in which case membership is also clipped to
    /// the closed hemisphere.
    pub fn spherical_simplex(ss: &SphericalSimplex) -> Self {
        let safe = ss.generators().iter().all(|g| g[0] >= 0.0);
        let ss = ss.clone();
        if safe {
            Self::new("spherical simplex", true, move |x| x[0] >= -HEMISPHERE_SLACK && ss.contains_raw(x))
        } else {
            Self::new("spherical simplex", false, move |x| ss.contains_raw(x))
        }
    }

    /// The spherical image `V_i` of vertex `i`.
    pub fn voronoi_cell(simplex: &EuclideanSimplex, i: usize) -> Self {
        let s = simplex.clone();
        Self::new(format!("V_{i}"), false, move |x| s.voronoi_assign(x) == i)
    }

    /// The image `f_s(R)`: `y` belongs to it iff `f_{-s}(y)` belongs to `R`.
    /// `f_s` preserves the sign of `x_1`, so hemisphere safety carries over.
    pub fn sheared(&self, shear: ShearMap) -> Self {
        let inner = self.membership.clone();
        let back = shear.inverse();
        Self {
            membership: Arc::new(move |y| inner(&back.apply_raw(y))),
            label: format!("f_{}({})", shear.s, self.label),
            hemisphere_safe: self.hemisphere_safe,
        }
    }

    /// The strip `R_I`.
    pub fn strip(&self, interval: StripInterval) -> Self {
        let inner = self.membership.clone();
        Self {
            membership: Arc::new(move |x| interval.contains_point(x) && inner(x)),
            label: format!("{}_[{}, {})", self.label, interval.t_lo, interval.t_hi),
            hemisphere_safe: true,
        }
    }

    pub fn intersection(&self, other: &Region) -> Self {
        let (a, b) = (self.membership.clone(), other.membership.clone());
        Self {
            membership: Arc::new(move |x| a(x) && b(x)),
            label: format!("{} ∩ {}", self.label, other.label),
            hemisphere_safe: self.hemisphere_safe || other.hemisphere_safe,
        }
    }
}

/// A half-open slope window `[t_lo, t_hi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripInterval {
    pub t_lo: f64,
    pub t_hi: f64,
}

impl StripInterval {
    pub fn new(t_lo: f64, t_hi: f64) -> Result<Self> {
        if !(t_lo < t_hi) || t_lo.is_nan() || t_hi.is_nan() {
            return Err(Error::InvalidParameter(format!("strip interval [{t_lo}, {t_hi}) is empty")));
        }
        Ok(Self { t_lo, t_hi })
    }

    pub fn width(&self) -> f64 {
        self.t_hi - self.t_lo
    }

    pub fn shifted(&self, s: f64) -> Self {
        Self { t_lo: self.t_lo + s, t_hi: self.t_hi + s }
    }

    #[inline]
    pub fn contains_slope(&self, t: f64) -> bool {
        t >= self.t_lo && t < self.t_hi
    }

    /// `x_1 > 0` (beyond the floor) and `x_2/x_1 ∈ [t_lo, t_hi)`.
    #[inline]
    pub fn contains_point(&self, x: &[f64]) -> bool {
        x[0] > STRIP_X1_FLOOR && self.contains_slope(x[1] / x[0])
    }
}

/// Which coordinate a strip integral integrates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StripCoordinate {
    X1,
    X2,
}

impl StripCoordinate {
    fn index(self) -> usize {
        match self {
            StripCoordinate::X1 => 0,
            StripCoordinate::X2 => 1,
        }
    }
}

impl TryFrom<usize> for StripCoordinate {
    type Error = Error;
    fn try_from(c: usize) -> Result<Self> {
        match c {
            1 => Ok(StripCoordinate::X1),
            2 => Ok(StripCoordinate::X2),
            _ => Err(Error::InvalidParameter(format!("strip coordinate must be 1 or 2, got {c}"))),
        }
    }
}

/// Moments of a vector functional of the stream, with per-column acceptance
/// counts.
struct Tally {
    moments: MomentMatrix,
    accepted: Vec<u64>,
    min_accepted_x1: f64,
}

/// `fill` writes the per-sample vector into a zeroed buffer and returns a
/// bitmask of the columns whose indicator accepted the sample.
fn tally<F>(stream: &SampleStream, k: usize, fill: F) -> Tally
where
    F: Fn(&[f64], &mut [f64]) -> u64 + Sync,
{
    assert!(k <= 64);
    let (t, _) = stream.fold(
        || {
            (
                Tally { moments: MomentMatrix::new(k), accepted: vec![0; k], min_accepted_x1: f64::INFINITY },
                vec![0.0; k],
            )
        },
        |(t, y), x| {
            y.iter_mut().for_each(|v| *v = 0.0);
            let mask = fill(x, y);
            t.moments.push(y);
            if mask != 0 {
                t.min_accepted_x1 = t.min_accepted_x1.min(x[0]);
                for (j, a) in t.accepted.iter_mut().enumerate() {
                    *a += (mask >> j) & 1;
                }
            }
        },
        |(a, _), (b, _)| {
            a.moments.merge(b.moments);
            for (p, q) in a.accepted.iter_mut().zip(b.accepted) {
                *p += q;
            }
            a.min_accepted_x1 = a.min_accepted_x1.min(b.min_accepted_x1);
        },
    );
    t
}

fn estimate_column(t: &Tally, cov: &DMatrix<f64>, j: usize, seed: u64) -> MonteCarloEstimate {
    MonteCarloEstimate {
        value: t.moments.means()[j],
        std_error: cov[(j, j)].max(0.0).sqrt(),
        n_samples: t.moments.count(),
        seed,
    }
}

/// A spherical centroid with the statistics behind it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentroidEstimate {
    pub centroid: UnitVector,
    /// `∫_R x dμ` against the uniform probability measure.
    pub resultant: Vec<f64>,
    pub resultant_norm: f64,
    /// Approximate standard error of the centroid direction, in radians.
    pub angular_std_error: f64,
    /// `μ(R)`.
    pub measure: MonteCarloEstimate,
    pub n_samples: u64,
    pub seed: u64,
}

pub fn centroid(region: &Region, dim: usize, n: u64, seed: u64) -> Result<CentroidEstimate> {
    centroid_with(region, &SampleStream::iid(dim, n, seed)?)
}

pub fn centroid_with(region: &Region, stream: &SampleStream) -> Result<CentroidEstimate> {
    let d = stream.dim;
    // columns: x_1..x_d restricted to R, then the indicator
    let t = tally(stream, d + 1, |x, y| {
        if region.contains_raw(x) {
            y[..d].copy_from_slice(x);
            y[d] = 1.0;
            1
        } else {
            0
        }
    });
    if t.accepted[0] == 0 {
        return Err(Error::EmptyRegion);
    }
    if region.hemisphere_safe && t.min_accepted_x1 < -HEMISPHERE_SLACK {
        return Err(Error::OutsideHemisphere { x1: t.min_accepted_x1 });
    }
    let means = t.moments.means();
    let resultant = means[..d].to_vec();
    let r = norm(&resultant);
    if !(r >= RESULTANT_TOLERANCE) {
        return Err(Error::UndefinedCentroid { norm: r });
    }
    let cov = t.moments.covariance_of_means();
    let g = project(&resultant)?;
    // spread of the resultant orthogonal to its direction
    let mut tangential = 0.0;
    for i in 0..d {
        for j in 0..d {
            let p_i = |k: usize| if i == k { 1.0 } else { 0.0 } - g[i] * g[k];
            let mut row = 0.0;
            for k in 0..d {
                row += p_i(k) * cov[(k, j)];
            }
            let p_ij = if i == j { 1.0 } else { 0.0 } - g[i] * g[j];
            tangential += row * p_ij;
        }
    }
    Ok(CentroidEstimate {
        centroid: g,
        resultant,
        resultant_norm: r,
        angular_std_error: tangential.max(0.0).sqrt() / r,
        measure: estimate_column(&t, &cov, d, stream.seed),
        n_samples: stream.n_samples,
        seed: stream.seed,
    })
}

fn require_hemisphere_safe(region: &Region) -> Result<()> {
    if !region.hemisphere_safe {
        return Err(Error::InvalidParameter(format!(
            "strip integrals need a region inside the hemisphere x_1 >= 0 (got '{}')",
            region.label
        )));
    }
    Ok(())
}

/// `∫_{R_I} x_c dμ`.
pub fn strip_integral(
    region: &Region,
    interval: StripInterval,
    coordinate: StripCoordinate,
    dim: usize,
    n: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    strip_integral_with(region, interval, coordinate, &SampleStream::iid(dim, n, seed)?)
}

pub fn strip_integral_with(
    region: &Region,
    interval: StripInterval,
    coordinate: StripCoordinate,
    stream: &SampleStream,
) -> Result<MonteCarloEstimate> {
    require_hemisphere_safe(region)?;
    let c = coordinate.index();
    let t = tally(stream, 1, |x, y| {
        if interval.contains_point(x) && region.contains_raw(x) {
            y[0] = x[c];
            1
        } else {
            0
        }
    });
    if t.accepted[0] == 0 {
        return Err(Error::EmptyRegion);
    }
    Ok(estimate_column(&t, &t.moments.covariance_of_means(), 0, stream.seed))
}

/// `∫_{R_I} x_2 dμ / ∫_{R_I} x_1 dμ` on one stream, with its delta-method
/// standard error. For a thin strip this is close to the strip's slope.
pub fn strip_slope(region: &Region, interval: StripInterval, stream: &SampleStream) -> Result<MonteCarloEstimate> {
    require_hemisphere_safe(region)?;
    let t = tally(stream, 2, |x, y| {
        if interval.contains_point(x) && region.contains_raw(x) {
            y[0] = x[0];
            y[1] = x[1];
            0b11
        } else {
            0
        }
    });
    if t.accepted[0] == 0 {
        return Err(Error::EmptyRegion);
    }
    let m = t.moments.means();
    let ratio = m[1] / m[0];
    let se = delta_method_std_error(&[-ratio / m[0], 1.0 / m[0]], &t.moments.covariance_of_means());
    Ok(MonteCarloEstimate { value: ratio, std_error: se, n_samples: stream.n_samples, seed: stream.seed })
}

/// Outcome of a statistical comparison at the 3σ level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Violated,
    Inconclusive,
}

impl Verdict {
    /// Classifies `difference` (expected positive) against `k` standard errors.
    pub fn classify(difference: f64, std_error: f64, k: f64) -> Self {
        if difference > k * std_error {
            Verdict::Consistent
        } else if difference < -k * std_error {
            Verdict::Violated
        } else {
            Verdict::Inconclusive
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "consistent",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

pub const VERDICT_SIGMAS: f64 = 3.0;

/// Both sides of the strip-ratio comparison for `T = f_s(S)`:
/// `∫_{T_{I-s}} x_1 / ∫_{S_{I-s}} x_1` (left) against
/// `∫_{T_I} x_1 / ∫_{S_I} x_1` (right) with `I = [t1, t2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripRatioRecord {
    pub dim: usize,
    pub s: f64,
    pub t1: f64,
    pub t2: f64,
    /// `[S_{I-s}, T_{I-s}, S_I, T_I]`, each `∫ x_1 dμ`.
    pub integrals: Vec<f64>,
    pub integral_std_errors: Vec<f64>,
    /// `[left, right]`.
    pub ratios: Vec<f64>,
    pub ratio_std_errors: Vec<f64>,
    /// `right - left`.
    pub difference: f64,
    pub difference_std_error: f64,
    pub verdict: Verdict,
    pub n_samples: u64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExperimentOptions {
    /// Admit `s = 0` and other degenerate parameters.
    pub test_mode: bool,
}

fn in_cone_after_unshear(ss: &SphericalSimplex, x: &[f64], s: f64) -> bool {
    if s == 0.0 {
        return ss.contains_raw(x);
    }
    let mut y = x.to_vec();
    y[1] -= s * x[0];
    ss.contains_raw(&y)
}

pub fn strip_ratio_experiment(
    simplex: &SphericalSimplex,
    s: f64,
    t1: f64,
    t2: f64,
    n: u64,
    seed: u64,
    options: ExperimentOptions,
) -> Result<StripRatioRecord> {
    strip_ratio_experiment_with(simplex, s, t1, t2, &SampleStream::iid(simplex.dim(), n, seed)?, options)
}

pub fn strip_ratio_experiment_with(
    simplex: &SphericalSimplex,
    s: f64,
    t1: f64,
    t2: f64,
    stream: &SampleStream,
    options: ExperimentOptions,
) -> Result<StripRatioRecord> {
    if stream.dim != simplex.dim() {
        return Err(Error::DimensionMismatch { expected: simplex.dim(), found: stream.dim });
    }
    let width = t2 - t1;
    if !(width > 0.0) {
        return Err(Error::InvalidParameter(format!("need t1 < t2, got [{t1}, {t2})")));
    }
    if !options.test_mode && !(width < s) {
        return Err(Error::InvalidParameter(format!("need 0 < t2 - t1 < s, got t2 - t1 = {width}, s = {s}")));
    }
    if let Some(g) = simplex.generators().iter().find(|g| !(g[0] > 0.0)) {
        return Err(Error::OutsideHemisphere { x1: g[0] });
    }
    let hi = StripInterval::new(t1, t2)?;
    let lo = hi.shifted(-s);
    let t = tally(stream, 4, |x, y| {
        let in_lo = lo.contains_point(x);
        let in_hi = hi.contains_point(x);
        if !in_lo && !in_hi {
            return 0;
        }
        let in_s = simplex.contains_raw(x);
        let in_t = in_cone_after_unshear(simplex, x, s);
        let mut mask = 0;
        for (j, hit) in [in_s && in_lo, in_t && in_lo, in_s && in_hi, in_t && in_hi].into_iter().enumerate() {
            if hit {
                y[j] = x[0];
                mask |= 1 << j;
            }
        }
        mask
    });
    if t.accepted.contains(&0) {
        return Err(Error::EmptyRegion);
    }
    let m = t.moments.means();
    let cov = t.moments.covariance_of_means();
    let left = m[1] / m[0];
    let right = m[3] / m[2];
    let gl = [-left / m[0], 1.0 / m[0], 0.0, 0.0];
    let gr = [0.0, 0.0, -right / m[2], 1.0 / m[2]];
    let gd: Vec<f64> = gr.iter().zip(&gl).map(|(r, l)| r - l).collect();
    let difference = right - left;
    let difference_std_error = delta_method_std_error(&gd, &cov);
    Ok(StripRatioRecord {
        dim: stream.dim,
        s,
        t1,
        t2,
        integrals: m,
        integral_std_errors: (0..4).map(|j| cov[(j, j)].max(0.0).sqrt()).collect(),
        ratios: vec![left, right],
        ratio_std_errors: vec![delta_method_std_error(&gl, &cov), delta_method_std_error(&gr, &cov)],
        difference,
        difference_std_error,
        verdict: Verdict::classify(difference, difference_std_error, VERDICT_SIGMAS),
        n_samples: stream.n_samples,
        seed: stream.seed,
    })
}

/// Centroid slope `G(f_s(S)) . e_2 / G(f_s(S)) . e_1` for one `s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeEntry {
    pub s: f64,
    pub slope: f64,
    pub slope_std_error: f64,
    /// `∫_{f_s(S)} x_1 dμ` and `∫_{f_s(S)} x_2 dμ`.
    pub resultant_x1: f64,
    pub resultant_x2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeDifference {
    pub from_s: f64,
    pub to_s: f64,
    pub difference: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessRecord {
    pub dim: usize,
    pub entries: Vec<SlopeEntry>,
    /// Consecutive differences, oriented so that a positive value agrees
    /// with a slope increasing in `s`. Pairs with equal `s` are skipped.
    pub differences: Vec<SlopeDifference>,
    pub verdict: Verdict,
    pub n_samples: u64,
    pub seed: u64,
}

pub fn centroid_uniqueness_experiment(
    simplex: &SphericalSimplex,
    s_values: &[f64],
    n: u64,
    seed: u64,
) -> Result<UniquenessRecord> {
    centroid_uniqueness_experiment_with(simplex, s_values, &SampleStream::iid(simplex.dim(), n, seed)?)
}

pub fn centroid_uniqueness_experiment_with(
    simplex: &SphericalSimplex,
    s_values: &[f64],
    stream: &SampleStream,
) -> Result<UniquenessRecord> {
    if stream.dim != simplex.dim() {
        return Err(Error::DimensionMismatch { expected: simplex.dim(), found: stream.dim });
    }
    let k = s_values.len();
    if k == 0 || 2 * k > 64 {
        return Err(Error::InvalidParameter(format!("need between 1 and 32 shear values, got {k}")));
    }
    if let Some(g) = simplex.generators().iter().find(|g| g[0] < 0.0) {
        return Err(Error::OutsideHemisphere { x1: g[0] });
    }
    let t = tally(stream, 2 * k, |x, y| {
        let mut mask = 0;
        for (i, &s) in s_values.iter().enumerate() {
            if in_cone_after_unshear(simplex, x, s) {
                y[2 * i] = x[0];
                y[2 * i + 1] = x[1];
                mask |= 0b11 << (2 * i);
            }
        }
        mask
    });
    if t.accepted.contains(&0) {
        return Err(Error::EmptyRegion);
    }
    let m = t.moments.means();
    let cov = t.moments.covariance_of_means();
    let mut grads = Vec::with_capacity(k);
    let mut entries = Vec::with_capacity(k);
    for (i, &s) in s_values.iter().enumerate() {
        let (a, b) = (m[2 * i], m[2 * i + 1]);
        let slope = b / a;
        let mut g = vec![0.0; 2 * k];
        g[2 * i] = -slope / a;
        g[2 * i + 1] = 1.0 / a;
        entries.push(SlopeEntry {
            s,
            slope,
            slope_std_error: delta_method_std_error(&g, &cov),
            resultant_x1: a,
            resultant_x2: b,
        });
        grads.push(g);
    }
    let mut differences = Vec::new();
    for i in 0..k.saturating_sub(1) {
        let (s0, s1) = (s_values[i], s_values[i + 1]);
        if s0 == s1 {
            continue;
        }
        let sign = if s1 > s0 { 1.0 } else { -1.0 };
        let gd: Vec<f64> = grads[i + 1].iter().zip(&grads[i]).map(|(p, q)| sign * (p - q)).collect();
        differences.push(SlopeDifference {
            from_s: s0,
            to_s: s1,
            difference: sign * (entries[i + 1].slope - entries[i].slope),
            std_error: delta_method_std_error(&gd, &cov),
        });
    }
    let verdicts: Vec<Verdict> =
        differences.iter().map(|d| Verdict::classify(d.difference, d.std_error, VERDICT_SIGMAS)).collect();
    let verdict = if verdicts.contains(&Verdict::Violated) {
        Verdict::Violated
    } else if !verdicts.is_empty() && verdicts.iter().all(|&v| v == Verdict::Consistent) {
        Verdict::Consistent
    } else {
        Verdict::Inconclusive
    };
    Ok(UniquenessRecord {
        dim: stream.dim,
        entries,
        differences,
        verdict,
        n_samples: stream.n_samples,
        seed: stream.seed,
    })
}
