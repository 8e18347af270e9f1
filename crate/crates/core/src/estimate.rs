//! Monte Carlo estimates and order-independent accumulators.
//!
//! Every per-sample contribution is quantized to a fixed-point grid of
//! `2^-56` and summed in 128-bit integers. Integer addition is associative,
//! so chunked (possibly parallel) reductions are bit-identical regardless of
//! chunk order, and partition identities such as "the per-cell sums add up
//! to the total" hold exactly rather than up to rounding.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

const SCALE: f64 = (1u64 << 56) as f64;
const MAX_ABS: f64 = (1u128 << 70) as f64;

#[inline]
fn quantize(x: f64) -> i128 {
    debug_assert!(x.is_finite() && x.abs() < MAX_ABS, "value {x} out of accumulator range");
    (x * SCALE).round() as i128
}

/// Fixed-point sum with exact, associative addition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ExactSum(i128);

impl ExactSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        self.0 += quantize(x);
    }

    #[inline]
    pub fn merge(&mut self, other: ExactSum) {
        self.0 += other.0;
    }

    /// The raw fixed-point total, in units of `2^-56`.
    pub fn raw(self) -> i128 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / SCALE
    }
}

impl std::iter::Sum for ExactSum {
    fn sum<I: Iterator<Item = ExactSum>>(iter: I) -> Self {
        let mut acc = ExactSum::default();
        for s in iter {
            acc.merge(s);
        }
        acc
    }
}

/// A Monte Carlo estimate of an integral against the uniform probability
/// measure on the sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub value: f64,
    /// Sample standard deviation over `sqrt(n_samples)`.
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl MonteCarloEstimate {
    /// Number of combined standard errors separating two estimates.
    pub fn z_score(&self, other: &MonteCarloEstimate) -> f64 {
        let se = self.combined_std_error(other);
        let diff = (self.value - other.value).abs();
        if se == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / se
        }
    }

    pub fn combined_std_error(&self, other: &MonteCarloEstimate) -> f64 {
        self.std_error.hypot(other.std_error)
    }

    /// Whether `target` lies within `k` standard errors of the estimate.
    pub fn agrees_with(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.std_error
    }
}

/// First and second moments of a scalar sample stream.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Moments {
    pub sum: ExactSum,
    pub sum_sq: ExactSum,
    pub count: u64,
}

impl Moments {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.sum.add(x);
        self.sum_sq.add(x * x);
        self.count += 1;
    }

    /// Records `count` zero-valued samples.
    #[inline]
    pub fn push_zeros(&mut self, count: u64) {
        self.count += count;
    }

    pub fn merge(&mut self, other: Moments) {
        self.sum.merge(other.sum);
        self.sum_sq.merge(other.sum_sq);
        self.count += other.count;
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        self.sum.value() / self.count as f64
    }

    pub fn sample_variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let mean = self.mean();
        let var = (self.sum_sq.value() - n * mean * mean) / (n - 1.0);
        var.max(0.0)
    }

    /// Estimate of `scale * E[x]`.
    pub fn estimate(&self, scale: f64, seed: u64) -> MonteCarloEstimate {
        let n = self.count.max(1) as f64;
        MonteCarloEstimate {
            value: scale * self.mean(),
            std_error: scale.abs() * (self.sample_variance() / n).sqrt(),
            n_samples: self.count,
            seed,
        }
    }
}

/// Means and full covariance of a vector-valued sample stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentMatrix {
    k: usize,
    sums: Vec<ExactSum>,
    // upper triangle, row-major
    cross: Vec<ExactSum>,
    count: u64,
}

impl MomentMatrix {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            sums: vec![ExactSum::default(); k],
            cross: vec![ExactSum::default(); k * (k + 1) / 2],
            count: 0,
        }
    }

    pub fn width(&self) -> usize {
        self.k
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    #[inline]
    pub fn push(&mut self, y: &[f64]) {
        debug_assert_eq!(y.len(), self.k);
        let mut idx = 0;
        for i in 0..self.k {
            self.sums[i].add(y[i]);
            for j in i..self.k {
                if y[i] != 0.0 && y[j] != 0.0 {
                    self.cross[idx].add(y[i] * y[j]);
                }
                idx += 1;
            }
        }
        self.count += 1;
    }

    pub fn merge(&mut self, other: MomentMatrix) {
        assert_eq!(self.k, other.k);
        for (a, b) in self.sums.iter_mut().zip(other.sums) {
            a.merge(b);
        }
        for (a, b) in self.cross.iter_mut().zip(other.cross) {
            a.merge(b);
        }
        self.count += other.count;
    }

    pub fn sum(&self, i: usize) -> ExactSum {
        self.sums[i]
    }

    pub fn means(&self) -> Vec<f64> {
        let n = self.count.max(1) as f64;
        self.sums.iter().map(|s| s.value() / n).collect()
    }

    /// Sample covariance of the per-sample vectors.
    pub fn covariance(&self) -> DMatrix<f64> {
        let mut cov = DMatrix::zeros(self.k, self.k);
        if self.count < 2 {
            return cov;
        }
        let n = self.count as f64;
        let means = self.means();
        let mut idx = 0;
        for i in 0..self.k {
            for j in i..self.k {
                let c = (self.cross[idx].value() - n * means[i] * means[j]) / (n - 1.0);
                cov[(i, j)] = c;
                cov[(j, i)] = c;
                idx += 1;
            }
        }
        cov
    }

    /// Covariance of the vector of sample means.
    pub fn covariance_of_means(&self) -> DMatrix<f64> {
        self.covariance() / self.count.max(1) as f64
    }
}

/// Standard error of a smooth function of the means, by the delta method.
pub fn delta_method_std_error(gradient: &[f64], covariance_of_means: &DMatrix<f64>) -> f64 {
    let k = gradient.len();
    let mut var = 0.0;
    for i in 0..k {
        for j in 0..k {
            var += gradient[i] * covariance_of_means[(i, j)] * gradient[j];
        }
    }
    var.max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_sum_is_order_independent() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i as f64) * 0.7310585786).sin() * 1e-3 + 0.3).collect();
        let mut fwd = ExactSum::default();
        xs.iter().for_each(|&x| fwd.add(x));
        let mut rev = ExactSum::default();
        xs.iter().rev().for_each(|&x| rev.add(x));
        assert_eq!(fwd, rev);
        assert!((fwd.value() - xs.iter().sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn moments_match_textbook_formulas() {
        let xs = [1.0, 2.0, 4.0, 7.0];
        let mut m = Moments::default();
        xs.iter().for_each(|&x| m.push(x));
        assert!((m.mean() - 3.5).abs() < 1e-15);
        // sum of squared deviations = 6.25 + 2.25 + 0.25 + 12.25 = 21
        assert!((m.sample_variance() - 7.0).abs() < 1e-12);
        let est = m.estimate(2.0, 9);
        assert!((est.value - 7.0).abs() < 1e-15);
        assert!((est.std_error - 2.0 * (7.0f64 / 4.0).sqrt()).abs() < 1e-12);
        assert_eq!(est.seed, 9);
    }

    #[test]
    fn moment_matrix_covariance() {
        let mut mm = MomentMatrix::new(2);
        for &(a, b) in &[(1.0, 2.0), (2.0, 4.0), (3.0, 6.0)] {
            mm.push(&[a, b]);
        }
        let c = mm.covariance();
        assert!((c[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((c[(0, 1)] - 2.0).abs() < 1e-12);
        assert!((c[(1, 1)] - 4.0).abs() < 1e-12);
    }
}
