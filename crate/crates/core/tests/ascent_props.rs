mod common;

use common::*;
use simplex_meanwidth::ascent::{
    ascend, ascend_with, check_necessary_conditions, lloyd_step, verify_switch_point, AscentOptions,
};
use simplex_meanwidth::centroid::{centroid, Region};
use simplex_meanwidth::error::Error;
use simplex_meanwidth::meanwidth::mean_width_mc;
use simplex_meanwidth::simplex::{random_orthogonal, EuclideanSimplex};
use simplex_meanwidth::sphere::{project, SamplerKind, UnitVector};

#[test]
fn regular_start_converges_immediately() {
    for d in [3, 4] {
        let t = ascend(&EuclideanSimplex::regular(d).unwrap(), 1e-3, 50, 1_000_000, 1).unwrap();
        assert!(t.converged);
        assert_eq!(t.iterations, 1);
    }
}

#[test]
fn one_step_from_a_perturbed_simplex_gains_width() {
    let start = EuclideanSimplex::perturbed_regular(3, 0.3).unwrap();
    let next = lloyd_step(&start, 1_000_000, 1).unwrap();
    let before = mean_width_mc(&start, 1_000_000, 2).unwrap();
    let after = mean_width_mc(&next, 1_000_000, 3).unwrap();
    assert!(after.value - before.value > 3.0 * before.combined_std_error(&after));
}

#[test]
fn steps_preserve_covering() {
    for seed in 0..100 {
        let s = EuclideanSimplex::random_covering(4, seed).unwrap();
        let next = lloyd_step(&s, 50_000, seed).unwrap();
        assert!(next.covers_sphere().unwrap(), "seed {seed}");
    }
}

#[test]
fn non_covering_start_is_rejected() {
    let mut r = rng(4);
    let vs: Vec<Vec<f64>> = (0..4)
        .map(|_| {
            let mut v = unit(&mut r, 3);
            v[0] = v[0].abs() + 0.5;
            project(&v).unwrap().into_inner()
        })
        .collect();
    let s = EuclideanSimplex::relaxed(vs).unwrap();
    let err = ascend(&s, 1e-3, 10, 100_000, 1).unwrap_err();
    assert!(matches!(err, Error::NotCovering | Error::EmptyCell { .. }), "{err}");
}

#[test]
fn trajectories_are_monotone_and_end_regular() {
    for seed in 0..6 {
        let start = EuclideanSimplex::random_covering(3, 100 + seed).unwrap();
        let opts = AscentOptions { n_samples: 200_000, seed, ..Default::default() };
        let t = ascend_with(&start, &opts).unwrap();
        assert!(t.converged);
        assert!(t.monotonicity_violations(3.0).is_empty());
        assert!(t.final_step().movement < opts.tol);
        assert!(t.final_regularity_distance() < 1e-2);

        // at the end the face circumcenters are equidistant from each other
        let cs = t.final_simplex().circumcenters().unwrap();
        let dots: Vec<f64> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).map(|(i, j)| dot(cs[i].as_slice(), cs[j].as_slice())).collect();
        let spread = dots.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - dots.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 10.0 * opts.tol, "{spread}");
    }
}

#[test]
fn ascent_commutes_with_rotation() {
    let start = EuclideanSimplex::random_covering(3, 9).unwrap();
    let q = random_orthogonal(3, 4);
    let run = |s: &EuclideanSimplex, seed| {
        let opts = AscentOptions { n_samples: 100_000, seed, max_iters: 6, sampler: SamplerKind::Iid, ..Default::default() };
        ascend_with(s, &opts).unwrap().steps.iter().map(|s| s.regularity_distance).collect::<Vec<_>>()
    };
    let base = run(&start, 0);
    let rotated = run(&start.transformed(&q).unwrap(), 0);
    // per-step spread from independent replicates
    let reps: Vec<Vec<f64>> = (1..9).map(|seed| run(&start, seed)).collect();
    assert!((base[0] - rotated[0]).abs() < 1e-12);
    for k in 1..base.len().min(rotated.len()) {
        let vals: Vec<f64> = reps.iter().filter_map(|r| r.get(k).copied()).collect();
        let m = vals.iter().sum::<f64>() / vals.len() as f64;
        let sd = (vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (vals.len() - 1) as f64).sqrt();
        assert!((base[k] - rotated[k]).abs() < 4.0 * std::f64::consts::SQRT_2 * sd, "step {k}: {} vs {} (sd {sd})", base[k], rotated[k]);
    }
}

#[test]
fn switch_point_at_the_antipode() {
    let cap = Region::cap(&UnitVector::new(vec![0.0, 0.6, 0.8]).unwrap(), 0.2);
    let g = centroid(&cap, 3, 100_000, 1).unwrap().centroid;
    let c = verify_switch_point(&cap, &g.neg(), 100_000, 1).unwrap();
    assert!((c.lhs + c.rhs).abs() < 1e-12 && c.holds);
    let c = verify_switch_point(&cap, &g, 100_000, 1).unwrap();
    assert!((c.lhs - c.rhs).abs() < 1e-12);
}

#[test]
fn necessary_condition_examples() {
    let c = check_necessary_conditions(&EuclideanSimplex::regular(4).unwrap()).unwrap();
    assert!(c.unit_enclosing_ball && c.unit_vertices && c.covers_sphere);

    let mut r = rng(5);
    let cap: Vec<Vec<f64>> = (0..5)
        .map(|_| {
            let mut v = unit(&mut r, 4);
            v[0] = v[0].abs() + 0.3;
            project(&v).unwrap().into_inner()
        })
        .collect();
    let c = check_necessary_conditions(&EuclideanSimplex::relaxed(cap).unwrap()).unwrap();
    assert!(!c.unit_enclosing_ball && c.unit_vertices && !c.covers_sphere);

    let shrunk = EuclideanSimplex::regular(4).unwrap().vertices().map(|v| v.iter().map(|x| 0.9 * x).collect()).collect();
    let c = check_necessary_conditions(&EuclideanSimplex::relaxed(shrunk).unwrap()).unwrap();
    assert!(!c.unit_enclosing_ball && !c.unit_vertices);
}
