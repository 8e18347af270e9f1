mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use simplex_meanwidth::error::Error;
use simplex_meanwidth::simplex::random_orthogonal;
use simplex_meanwidth::sphere::{covers_sphere, min_enclosing_ball, project, sample_uniform, SampleStream, UnitVector};

#[test]
fn projection_examples() {
    assert_eq!(project(&[2.0, 0.0, 0.0]).unwrap().as_slice(), &[1.0, 0.0, 0.0]);
    let p = project(&[1.0, 1.0, 0.0]).unwrap();
    assert!((p[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15 && (p[1] - p[0]).abs() == 0.0);
    assert!(matches!(project(&[0.0; 3]), Err(Error::ZeroVector)));
}

#[test]
fn uniform_samples_are_centred_unit_vectors() {
    let pts = sample_uniform(3, 1_000_000, 17).unwrap();
    let mut mean = [0.0; 3];
    let mut abs_x1 = 0.0;
    let mut abs_x1_sq = 0.0;
    for p in &pts {
        let n = p.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((n - 1.0).abs() < 1e-12);
        for k in 0..3 {
            mean[k] += p[k];
        }
        abs_x1 += p[0].abs();
        abs_x1_sq += p[0] * p[0];
    }
    let n = pts.len() as f64;
    for m in mean {
        assert!((m / n).abs() < 3.0 * (1.0 / 3f64.sqrt()) / 1e3);
    }
    // E|x_1| on S^2 is 1/2 and Var|x_1| = 1/3 - 1/4
    let e = abs_x1 / n;
    let se = ((abs_x1_sq / n - e * e) / n).sqrt();
    assert!((e - 0.5).abs() < 3.0 * se, "{e} ± {se}");
}

#[test]
fn sampler_rotation_invariance() {
    let mut r = rng(4);
    for (d, kind_seed) in [(3, 1u64), (5, 2), (8, 3)] {
        let u = unit(&mut r, d);
        let stream = SampleStream::iid(d, 400_000, kind_seed).unwrap();
        let pts = stream.collect();
        let vals: Vec<f64> = pts.iter().map(|p| dot(p.as_slice(), &u).powi(2)).collect();
        let n = vals.len() as f64;
        let m = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((m - 1.0 / d as f64).abs() < 4.0 * (var / n).sqrt(), "d={d}: {m}");
    }
}

#[test]
fn enclosing_ball_examples() {
    let reg = simplex_meanwidth::simplex::EuclideanSimplex::regular(5).unwrap();
    let b = min_enclosing_ball(&reg.vertices_vec()).unwrap();
    assert!((b.radius - 1.0).abs() < 1e-9 && b.center.iter().all(|c| c.abs() < 1e-9));
    let b = min_enclosing_ball(&[vec![1.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0]]).unwrap();
    assert!((b.radius - 1.0).abs() < 1e-12 && b.center.iter().all(|c| c.abs() < 1e-12));
}

/// Circumscribed ball of `pts` inside their affine hull, by the normal
/// equations of `2 (p_k - p_0)·(c - p_0) = |p_k - p_0|^2`.
fn circumball(pts: &[&Vec<f64>]) -> Option<(Vec<f64>, f64)> {
    let p0 = pts[0];
    if pts.len() == 1 {
        return Some((p0.clone(), 0.0));
    }
    let d = p0.len();
    let m = pts.len() - 1;
    let e = DMatrix::from_fn(d, m, |r, c| pts[c + 1][r] - p0[r]);
    let gram = e.transpose() * &e;
    let rhs = DVector::from_fn(m, |k, _| 0.5 * gram[(k, k)]);
    if gram.clone().svd(false, false).singular_values.min() < 1e-10 {
        return None;
    }
    let lambda = gram.lu().solve(&rhs)?;
    let offset = e * lambda;
    let center: Vec<f64> = (0..d).map(|r| p0[r] + offset[r]).collect();
    Some((center.clone(), dist(&center, p0)))
}

fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        cur.push(i);
        subsets(n, k, i + 1, cur, out);
        cur.pop();
    }
}

#[test]
fn enclosing_ball_matches_exhaustive_search() {
    let mut r = rng(2);
    for trial in 0..5 {
        let d = 4;
        let pts: Vec<Vec<f64>> = (0..20)
            .map(|_| if trial % 2 == 0 { unit(&mut r, d) } else { gaussian(&mut r, d) })
            .collect();
        let mut best = f64::INFINITY;
        for k in 1..=d + 1 {
            let mut all = Vec::new();
            subsets(pts.len(), k, 0, &mut Vec::new(), &mut all);
            for s in all {
                let sub: Vec<&Vec<f64>> = s.iter().map(|&i| &pts[i]).collect();
                if let Some((c, rad)) = circumball(&sub) {
                    if rad < best && pts.iter().all(|p| dist(p, &c) <= rad * (1.0 + 1e-12) + 1e-12) {
                        best = rad;
                    }
                }
            }
        }
        let ball = min_enclosing_ball(&pts).unwrap();
        assert!((ball.radius - best).abs() < 1e-9, "trial {trial}: {} vs {best}", ball.radius);
    }
}

#[test]
fn covering_examples() {
    let reg = simplex_meanwidth::simplex::EuclideanSimplex::regular(4).unwrap();
    assert!(covers_sphere(&reg.unit_vertices()).unwrap());
    let mut r = rng(8);
    let tilted: Vec<UnitVector> = (0..4)
        .map(|_| {
            let mut v = unit(&mut r, 3);
            v[0] = 0.5 + 0.5 * v[0].abs();
            project(&v).unwrap()
        })
        .collect();
    assert!(tilted.iter().all(|v| v[0] >= 0.5));
    assert!(!covers_sphere(&tilted).unwrap());
}

/// Flags a vertex set as non-covering if some sampled direction has every
/// dot product below `-1e-6`.
fn sampled_direction_oracle(vertices: &[Vec<f64>], directions: &[UnitVector]) -> bool {
    !directions.iter().any(|x| vertices.iter().all(|v| dot(v, x.as_slice()) < -1e-6))
}

/// Distance from the origin to the convex hull of `vs` (Frank–Wolfe). When
/// the origin is outside, this is the depth `max_x min_i -v_i·x` of the
/// largest uncovered cap.
fn hull_distance(vs: &[Vec<f64>]) -> f64 {
    let d = vs[0].len();
    let mut p: Vec<f64> = (0..d).map(|k| vs.iter().map(|v| v[k]).sum::<f64>() / vs.len() as f64).collect();
    for it in 0..20_000 {
        let s = vs.iter().min_by(|a, b| dot(a, &p).total_cmp(&dot(b, &p))).unwrap();
        let dir: Vec<f64> = s.iter().zip(&p).map(|(a, b)| a - b).collect();
        let dd = dot(&dir, &dir);
        if dd == 0.0 {
            break;
        }
        let step = (-dot(&p, &dir) / dd).clamp(0.0, (2.0 / (it as f64 + 2.0)).min(1.0));
        p.iter_mut().zip(&dir).for_each(|(a, b)| *a += step * b);
    }
    dot(&p, &p).sqrt()
}

#[test]
fn covering_agrees_with_sampled_directions() {
    let mut r = rng(31);
    let mut disagreements = 0;
    let mut counts = [0; 2];
    for d in [3, 4] {
        let directions = sample_uniform(d, 100_000, d as u64).unwrap();
        let regular = simplex_meanwidth::simplex::EuclideanSimplex::regular(d).unwrap().vertices_vec();
        for trial in 0..60 {
            // noisy regular simplexes straddle the covering boundary
            let noise = 0.3 + 0.02 * trial as f64;
            let vs: Vec<Vec<f64>> = regular
                .iter()
                .map(|v| {
                    let z = gaussian(&mut r, d);
                    project(&v.iter().zip(&z).map(|(a, b)| a + noise * b).collect::<Vec<_>>()).unwrap().into_inner()
                })
                .collect();
            let units: Vec<UnitVector> = vs.iter().map(|v| UnitVector::new(v.clone()).unwrap()).collect();
            let covers = covers_sphere(&units).unwrap();
            let oracle = sampled_direction_oracle(&vs, &directions);
            counts[covers as usize] += 1;
            // the oracle cannot see uncovered caps thinner than its sampling
            if covers != oracle {
                assert!(!covers && oracle, "oracle found a hole in a covering set");
                let depth = hull_distance(&vs);
                assert!(depth < 0.02, "oracle missed a hole of depth {depth}");
                disagreements += 1;
            }
        }
    }
    assert!(counts[0] > 10 && counts[1] > 10, "{counts:?}");
    assert!(disagreements <= 5, "{disagreements}");
}

fn unit_strategy(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, d).prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-4)
}

proptest! {
    #[test]
    fn project_is_idempotent_and_scale_invariant(v in unit_strategy(5), c in 1e-3f64..1e3) {
        let p = project(&v).unwrap();
        let scaled: Vec<f64> = v.iter().map(|x| c * x).collect();
        let q = project(&scaled).unwrap();
        let pp = project(p.as_slice()).unwrap();
        for k in 0..5 {
            prop_assert!((p[k] - q[k]).abs() < 1e-12);
            prop_assert!((p[k] - pp[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn enclosing_radius_is_bounded_by_diameter(seed in 0u64..1000, n in 2usize..12, d in 3usize..6) {
        let mut r = rng(seed);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| gaussian(&mut r, d)).collect();
        let diam = pts.iter().flat_map(|a| pts.iter().map(move |b| dist(a, b))).fold(0.0, f64::max);
        let b = min_enclosing_ball(&pts).unwrap();
        prop_assert!(b.radius <= diam + 1e-12);
        prop_assert!(b.radius >= diam / 2.0 - 1e-12);
        prop_assert!(pts.iter().all(|p| dist(p, &b.center) <= b.radius + 1e-9));
    }

    #[test]
    fn non_covering_sets_fit_in_a_smaller_ball(seed in 0u64..1000, d in 3usize..6) {
        let mut r = rng(seed);
        let q = random_orthogonal(d, seed);
        let vs: Vec<UnitVector> = (0..=d)
            .map(|_| {
                let mut v = unit(&mut r, d);
                v[0] = v[0].abs() * 0.5 + 0.05;
                let rotated: Vec<f64> = (0..d).map(|i| (0..d).map(|j| q[(i, j)] * v[j]).sum()).collect();
                project(&rotated).unwrap()
            })
            .collect();
        if !covers_sphere(&vs).unwrap() {
            let pts: Vec<Vec<f64>> = vs.iter().map(|v| v.as_slice().to_vec()).collect();
            prop_assert!(min_enclosing_ball(&pts).unwrap().radius < 1.0);
        }
    }
}
