use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed Euclidean ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn contains(&self, p: &[f64], slack: f64) -> bool {
        dist(&self.center, p) <= self.radius + slack
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

const INSIDE_SLACK: f64 = 1e-12;

/// Smallest ball containing `points`, by Welzl's move-to-front recursion.
pub fn min_enclosing_ball(points: &[Vec<f64>]) -> Result<Ball> {
    let d = match points.first() {
        Some(p) => p.len(),
        None => return Err(Error::InvalidParameter("enclosing ball of an empty set".into())),
    };
    if let Some(p) = points.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: p.len() });
    }
    let refs: Vec<&[f64]> = points.iter().map(|p| p.as_slice()).collect();
    let mut boundary = Vec::with_capacity(d + 1);
    Ok(welzl(&refs, refs.len(), &mut boundary, d))
}

fn welzl<'a>(points: &[&'a [f64]], n: usize, boundary: &mut Vec<&'a [f64]>, d: usize) -> Ball {
    let mut ball = ball_through(boundary, d);
    if boundary.len() == d + 1 {
        return ball;
    }
    for i in 0..n {
        if !ball.contains(points[i], INSIDE_SLACK * (1.0 + ball.radius)) {
            boundary.push(points[i]);
            ball = welzl(points, i, boundary, d);
            boundary.pop();
        }
    }
    ball
}

/// Smallest ball with every point of `boundary` on its surface: the
/// circumcenter within the affine hull.
fn ball_through(boundary: &[&[f64]], d: usize) -> Ball {
    match boundary.len() {
        0 => Ball { center: vec![0.0; d], radius: -1.0 },
        1 => Ball { center: boundary[0].to_vec(), radius: 0.0 },
        _ => {
            let center = affine_circumcenter(boundary);
            let radius = boundary.iter().map(|p| dist(&center, p)).fold(0.0, f64::max);
            Ball { center, radius }
        }
    }
}

/// Point of the affine hull of `pts` equidistant from all of them
/// (least-squares when the points are affinely dependent).
pub(crate) fn affine_circumcenter(pts: &[&[f64]]) -> Vec<f64> {
    let d = pts[0].len();
    let m = pts.len() - 1;
    let p0 = pts[0];
    let edges = DMatrix::from_fn(d, m, |r, c| pts[c + 1][r] - p0[r]);
    // 2 E^T E lambda = |e_k|^2
    let gram = edges.transpose() * &edges * 2.0;
    let rhs = DVector::from_fn(m, |k, _| edges.column(k).norm_squared());
    let lambda = match gram.clone().lu().solve(&rhs) {
        Some(l) if l.iter().all(|v| v.is_finite()) => l,
        _ => gram
            .svd(true, true)
            .solve(&rhs, 1e-14)
            .unwrap_or_else(|_| DVector::zeros(m)),
    };
    let offset = edges * lambda;
    (0..d).map(|r| p0[r] + offset[r]).collect()
}
