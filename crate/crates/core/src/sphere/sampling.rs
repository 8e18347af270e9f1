//! Reproducible point streams on `S^{d-1}`.
//!
//! A stream of `n` points is cut into fixed-size chunks. Chunk `k` of an
//! i.i.d. stream is drawn from `ChaCha8Rng::seed_from_u64(seed)` switched to
//! stream `k`; each point is a vector of standard normals divided by its
//! norm. A scrambled-Sobol stream maps Sobol point `i` through the inverse
//! normal CDF coordinatewise and normalizes the same way. Either way the
//! points of a chunk depend only on `(seed, chunk index)`, so chunks can be
//! processed in any order or in parallel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::sobol::{ScrambledSobol, SobolCursor, MAX_DIMENSIONS};
use super::UnitVector;
use crate::error::{Error, Result};

/// Points per chunk.
pub const CHUNK_SIZE: usize = 1 << 14;

/// How the points of a [`SampleStream`] are generated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    /// Independent uniform points (normalized Gaussian vectors).
    #[default]
    Iid,
    /// Randomized quasi-Monte Carlo: an Owen-scrambled Sobol set pushed
    /// through the inverse normal CDF and normalized.
    ScrambledSobol,
}

/// SplitMix64 finalizer, used to derive independent seeds.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for sub-stream `index` of `seed` (e.g. one per ascent iteration).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x5bd1_e995)))
}

/// A deterministic stream of `n_samples` points on `S^{dim-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleStream {
    pub dim: usize,
    pub n_samples: u64,
    pub seed: u64,
    pub kind: SamplerKind,
}

impl SampleStream {
    pub fn new(dim: usize, n_samples: u64, seed: u64, kind: SamplerKind) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall { dim });
        }
        if n_samples == 0 {
            return Err(Error::InvalidParameter("sample count must be positive".into()));
        }
        if kind == SamplerKind::ScrambledSobol {
            if dim > MAX_DIMENSIONS {
                return Err(Error::InvalidParameter(format!(
                    "scrambled Sobol sampling supports dim <= {MAX_DIMENSIONS}"
                )));
            }
            if n_samples > u32::MAX as u64 {
                return Err(Error::InvalidParameter("scrambled Sobol sampling supports n < 2^32".into()));
            }
        }
        Ok(Self { dim, n_samples, seed, kind })
    }

    pub fn iid(dim: usize, n_samples: u64, seed: u64) -> Result<Self> {
        Self::new(dim, n_samples, seed, SamplerKind::Iid)
    }

    pub fn n_chunks(&self) -> usize {
        self.n_samples.div_ceil(CHUNK_SIZE as u64) as usize
    }

    /// Calls `visit` on every point of chunk `k`, in stream order.
    pub fn visit_chunk(&self, k: usize, mut visit: impl FnMut(&[f64])) {
        let start = k as u64 * CHUNK_SIZE as u64;
        let len = (self.n_samples - start).min(CHUNK_SIZE as u64) as usize;
        let mut x = vec![0.0; self.dim];
        match self.kind {
            SamplerKind::Iid => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(k as u64);
                for _ in 0..len {
                    loop {
                        let mut norm_sq = 0.0;
                        for xi in x.iter_mut() {
                            let z: f64 = rng.sample(StandardNormal);
                            *xi = z;
                            norm_sq += z * z;
                        }
                        if norm_sq > 1e-200 {
                            let inv = 1.0 / norm_sq.sqrt();
                            x.iter_mut().for_each(|xi| *xi *= inv);
                            break;
                        }
                    }
                    visit(&x);
                }
            }
            SamplerKind::ScrambledSobol => {
                let sobol = ScrambledSobol::new(self.dim, self.seed);
                let mut cursor = SobolCursor::new(&sobol, start as u32);
                let normal = Normal::standard();
                for _ in 0..len {
                    cursor.next_point(&mut x);
                    let mut norm_sq = 0.0;
                    for xi in x.iter_mut() {
                        let z = normal.inverse_cdf(*xi);
                        *xi = z;
                        norm_sq += z * z;
                    }
                    if norm_sq <= 1e-200 {
                        // measure-zero: all coordinates at the cube centre
                        continue;
                    }
                    let inv = 1.0 / norm_sq.sqrt();
                    x.iter_mut().for_each(|xi| *xi *= inv);
                    visit(&x);
                }
            }
        }
    }

    /// Folds every point of the stream into an accumulator.
    ///
    /// Chunks are processed in parallel; per-chunk accumulators are merged
    /// sequentially in chunk order.
    pub fn fold<A, I, F, M>(&self, init: I, visit: F, merge: M) -> A
    where
        A: Send,
        I: Fn() -> A + Sync,
        F: Fn(&mut A, &[f64]) + Sync,
        M: Fn(&mut A, A),
    {
        let parts: Vec<A> = (0..self.n_chunks())
            .into_par_iter()
            .map(|k| {
                let mut acc = init();
                self.visit_chunk(k, |x| visit(&mut acc, x));
                acc
            })
            .collect();
        let mut iter = parts.into_iter();
        let mut total = iter.next().unwrap_or_else(&init);
        for part in iter {
            merge(&mut total, part);
        }
        total
    }

    /// Materializes the stream.
    pub fn collect(&self) -> Vec<UnitVector> {
        let mut out = Vec::with_capacity(self.n_samples as usize);
        for k in 0..self.n_chunks() {
            self.visit_chunk(k, |x| out.push(UnitVector::from_normalized(x.to_vec())));
        }
        out
    }
}

/// `n` i.i.d. uniform points on `S^{d-1}`, deterministic given `seed`.
pub fn sample_uniform(dim: usize, n: usize, seed: u64) -> Result<Vec<UnitVector>> {
    if dim < 3 {
        return Err(Error::DimensionTooSmall { dim });
    }
    Ok(SampleStream::iid(dim, n as u64, seed)?.collect())
}
