//! The longitudinal shift `f_s(x) = π(M_s x)`, where `M_s` adds `s x_1` to
//! the second coordinate and fixes every other coordinate.
//!
//! `f_s` fixes the great sphere `{x_1 = 0}`, moves the great spheres through
//! `{x_1 = x_2 = 0}` toward `e_2`, and forms a one-parameter group:
//! `f_{s+t} = f_s ∘ f_t`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{project, UnitVector};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShearMap {
    pub s: f64,
    pub dim: usize,
}

impl ShearMap {
    pub fn new(s: f64, dim: usize) -> Result<Self> {
        if dim < 3 {
            return Err(Error::DimensionTooSmall { dim });
        }
        if !s.is_finite() {
            return Err(Error::InvalidParameter(format!("shear parameter {s} is not finite")));
        }
        Ok(Self { s, dim })
    }

    pub fn inverse(&self) -> ShearMap {
        ShearMap { s: -self.s, dim: self.dim }
    }

    /// The matrix `M_s` (unit lower-triangular, determinant 1).
    pub fn matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::identity(self.dim, self.dim);
        m[(1, 0)] = self.s;
        m
    }

    /// `M_s x` without normalization.
    #[inline]
    pub fn linear(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        y[1] += self.s * x[0];
        y
    }

    /// `f_s(x)` for a raw unit vector. `s = 0` returns `x` unchanged.
    #[inline]
    pub fn apply_raw(&self, x: &[f64]) -> Vec<f64> {
        if self.s == 0.0 {
            return x.to_vec();
        }
        let mut y = self.linear(x);
        let n = crate::sphere::norm(&y);
        y.iter_mut().for_each(|v| *v /= n);
        y
    }

    pub fn apply(&self, x: &UnitVector) -> UnitVector {
        debug_assert_eq!(x.dim(), self.dim);
        UnitVector::from_normalized(self.apply_raw(x.as_slice()))
    }

    /// `Df_s(x) = (1 + (x_2 + s x_1)^2 - x_2^2)^{-d/2} = |M_s x|^{-d}`.
    #[inline]
    pub fn jacobian_raw(&self, x: &[f64]) -> f64 {
        let (x1, x2) = (x[0], x[1]);
        // (x_2 + s x_1)^2 - x_2^2, factored so that s = 0 or x_1 = 0 gives exactly 1
        let q = 1.0 + self.s * x1 * (2.0 * x2 + self.s * x1);
        q.powf(-(self.dim as f64) / 2.0)
    }

    pub fn jacobian(&self, x: &UnitVector) -> f64 {
        self.jacobian_raw(x.as_slice())
    }

    /// Density of the pushforward `f_s # μ` against `μ`, which is `Df_{-s}`.
    #[inline]
    pub fn pushforward_density_raw(&self, x: &[f64]) -> f64 {
        self.inverse().jacobian_raw(x)
    }

    pub fn pushforward_density(&self, x: &UnitVector) -> f64 {
        self.pushforward_density_raw(x.as_slice())
    }

    /// Pole of the image of the great sphere `{x : x . P = 0}`, namely
    /// `π(M_{-s}^T P)`.
    pub fn map_pole(&self, pole: &UnitVector) -> UnitVector {
        let mut q = pole.as_slice().to_vec();
        q[0] -= self.s * pole[1];
        project(&q).expect("M_{-s}^T is invertible")
    }
}

pub fn apply(shear: &ShearMap, x: &UnitVector) -> UnitVector {
    shear.apply(x)
}

pub fn jacobian(shear: &ShearMap, x: &UnitVector) -> f64 {
    shear.jacobian(x)
}

pub fn pushforward_density(shear: &ShearMap, x: &UnitVector) -> f64 {
    shear.pushforward_density(x)
}

pub fn map_pole(shear: &ShearMap, pole: &UnitVector) -> UnitVector {
    shear.map_pole(pole)
}
