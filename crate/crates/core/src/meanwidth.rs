//! Mean width `w = 2 ∫ max_i x . v_i dμ` by direct Monte Carlo and by the
//! per-cell decomposition over spherical images.
//!
//! Both integrators read the same sample stream for a given seed and
//! accumulate quantized values exactly, so the decomposition reproduces the
//! direct estimate bit-for-bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{ExactSum, Moments, MonteCarloEstimate};
use crate::simplex::EuclideanSimplex;
use crate::sphere::SampleStream;

pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const MIN_SAMPLES: u64 = 1_000;

/// Mean width with its per-cell contributions `2 ∫_{V_i} x . v_i dμ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanWidthReport {
    pub total: MonteCarloEstimate,
    pub per_cell: Vec<MonteCarloEstimate>,
    /// Empirical `μ(V_i)`.
    pub cell_measures: Vec<f64>,
    pub cell_counts: Vec<u64>,
    #[serde(skip)]
    total_raw: i128,
    #[serde(skip)]
    per_cell_raw: Vec<i128>,
}

impl MeanWidthReport {
    /// Fixed-point sums behind `total` and `per_cell`; the per-cell sums
    /// add up to the total exactly.
    pub fn raw_sums(&self) -> (i128, &[i128]) {
        (self.total_raw, &self.per_cell_raw)
    }
}

fn check_samples(n: u64) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!("mean width needs at least {MIN_SAMPLES} samples, got {n}")));
    }
    Ok(())
}

/// Direct estimate of `2 E[max_i X . v_i]` with `X` uniform on the sphere.
pub fn mean_width_mc(simplex: &EuclideanSimplex, n: u64, seed: u64) -> Result<MonteCarloEstimate> {
    check_samples(n)?;
    mean_width_mc_with(simplex, &SampleStream::iid(simplex.dim(), n, seed)?)
}

pub fn mean_width_mc_with(simplex: &EuclideanSimplex, stream: &SampleStream) -> Result<MonteCarloEstimate> {
    if stream.dim != simplex.dim() {
        return Err(Error::DimensionMismatch { expected: simplex.dim(), found: stream.dim });
    }
    let m = stream.fold(
        Moments::default,
        |m, x| m.push(simplex.support(x)),
        |a, b| a.merge(b),
    );
    Ok(m.estimate(2.0, stream.seed))
}

/// Mean width as the sum of per-cell contributions over the spherical images.
pub fn mean_width_cells(simplex: &EuclideanSimplex, n: u64, seed: u64) -> Result<MeanWidthReport> {
    check_samples(n)?;
    mean_width_cells_with(simplex, &SampleStream::iid(simplex.dim(), n, seed)?)
}

#[derive(Clone)]
struct CellSums {
    total: Moments,
    sum: Vec<ExactSum>,
    sum_sq: Vec<ExactSum>,
    count: Vec<u64>,
}

impl CellSums {
    fn new(k: usize) -> Self {
        Self {
            total: Moments::default(),
            sum: vec![ExactSum::default(); k],
            sum_sq: vec![ExactSum::default(); k],
            count: vec![0; k],
        }
    }

    fn merge(&mut self, other: CellSums) {
        self.total.merge(other.total);
        for i in 0..self.sum.len() {
            self.sum[i].merge(other.sum[i]);
            self.sum_sq[i].merge(other.sum_sq[i]);
            self.count[i] += other.count[i];
        }
    }
}

pub fn mean_width_cells_with(simplex: &EuclideanSimplex, stream: &SampleStream) -> Result<MeanWidthReport> {
    if stream.dim != simplex.dim() {
        return Err(Error::DimensionMismatch { expected: simplex.dim(), found: stream.dim });
    }
    let k = simplex.n_vertices();
    let sums = stream.fold(
        || CellSums::new(k),
        |acc, x| {
            let (i, value) = simplex.assign(x);
            acc.total.push(value);
            acc.sum[i].add(value);
            acc.sum_sq[i].add(value * value);
            acc.count[i] += 1;
        },
        CellSums::merge,
    );
    Ok(report_from_sums(&sums, stream.seed))
}

fn report_from_sums(sums: &CellSums, seed: u64) -> MeanWidthReport {
    let n = sums.total.count;
    let per_cell = (0..sums.sum.len())
        .map(|i| {
            Moments { sum: sums.sum[i], sum_sq: sums.sum_sq[i], count: n }.estimate(2.0, seed)
        })
        .collect();
    MeanWidthReport {
        total: sums.total.estimate(2.0, seed),
        per_cell,
        cell_measures: sums.count.iter().map(|&c| c as f64 / n.max(1) as f64).collect(),
        cell_counts: sums.count.clone(),
        total_raw: sums.total.sum.raw(),
        per_cell_raw: sums.sum.iter().map(|s| s.raw()).collect(),
    }
}

/// One pass over a stream producing the mean-width report together with
/// the per-cell resultants `Σ_{x ∈ V_i} x` and second moments
/// `Σ_{x ∈ V_i} x x^T` (upper triangle, row-major).
pub(crate) struct CellPass {
    pub report: MeanWidthReport,
    pub resultants: Vec<Vec<ExactSum>>,
    pub second_moments: Vec<Vec<ExactSum>>,
}

struct PassSums {
    cells: CellSums,
    first: Vec<Vec<ExactSum>>,
    second: Vec<Vec<ExactSum>>,
}

pub(crate) fn cell_pass(simplex: &EuclideanSimplex, stream: &SampleStream) -> Result<CellPass> {
    if stream.dim != simplex.dim() {
        return Err(Error::DimensionMismatch { expected: simplex.dim(), found: stream.dim });
    }
    let k = simplex.n_vertices();
    let d = simplex.dim();
    let tri = d * (d + 1) / 2;
    let sums = stream.fold(
        || PassSums {
            cells: CellSums::new(k),
            first: vec![vec![ExactSum::default(); d]; k],
            second: vec![vec![ExactSum::default(); tri]; k],
        },
        |acc, x| {
            let (i, value) = simplex.assign(x);
            let c = &mut acc.cells;
            c.total.push(value);
            c.sum[i].add(value);
            c.sum_sq[i].add(value * value);
            c.count[i] += 1;
            let mut idx = 0;
            for a in 0..d {
                acc.first[i][a].add(x[a]);
                for b in a..d {
                    acc.second[i][idx].add(x[a] * x[b]);
                    idx += 1;
                }
            }
        },
        |a, b| {
            a.cells.merge(b.cells);
            for (p, q) in a.first.iter_mut().flatten().zip(b.first.into_iter().flatten()) {
                p.merge(q);
            }
            for (p, q) in a.second.iter_mut().flatten().zip(b.second.into_iter().flatten()) {
                p.merge(q);
            }
        },
    );
    Ok(CellPass {
        report: report_from_sums(&sums.cells, stream.seed),
        resultants: sums.first,
        second_moments: sums.second,
    })
}
