mod common;

use common::*;
use proptest::prelude::*;
use rand::RngCore;
use simplex_meanwidth::simplex::{random_orthogonal, EuclideanSimplex, SphericalSimplex};
use simplex_meanwidth::sphere::{project, SampleStream, UnitVector};

/// `max_{p in Δ} x·p` over barycentric grid points with denominator `m`.
fn grid_support(vs: &[Vec<f64>], x: &[f64], m: usize) -> f64 {
    fn walk(vs: &[Vec<f64>], x: &[f64], m: usize, k: usize, left: usize, acc: f64, best: &mut f64) {
        if k + 1 == vs.len() {
            *best = best.max(acc + left as f64 / m as f64 * dot(&vs[k], x));
            return;
        }
        for c in 0..=left {
            walk(vs, x, m, k + 1, left - c, acc + c as f64 / m as f64 * dot(&vs[k], x), best);
        }
    }
    let mut best = f64::NEG_INFINITY;
    walk(vs, x, m, 0, m, 0.0, &mut best);
    best
}

#[test]
fn support_examples() {
    let reg = EuclideanSimplex::regular(3).unwrap();
    assert!((reg.support(reg.vertex(0)) - 1.0).abs() < 1e-15);
    let minus: Vec<f64> = reg.vertex(0).iter().map(|v| -v).collect();
    assert!((reg.support(&minus) - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn support_matches_barycentric_grid() {
    let mut r = rng(5);
    for d in [3, 4] {
        for _ in 0..20 {
            let s = EuclideanSimplex::random_covering(d, r.next_u64()).unwrap();
            let x = unit(&mut r, d);
            let grid = grid_support(&s.vertices_vec(), &x, 12);
            assert!((s.support(&x) - grid).abs() < 1e-9);
        }
    }
}



#[test]
fn voronoi_index_achieves_support() {
    let mut r = rng(6);
    let s = EuclideanSimplex::random_covering(5, 3).unwrap();
    for _ in 0..10_000 {
        let x = unit(&mut r, 5);
        let i = s.voronoi_assign(&x);
        assert!((dot(s.vertex(i), &x) - s.support(&x)).abs() < 1e-12);
    }
    let reg = EuclideanSimplex::regular(3).unwrap();
    for i in 0..4 {
        assert_eq!(reg.voronoi_assign(reg.vertex(i)), i);
    }
    // equidistant between v_0 and v_1
    let mid = project(&reg.vertex(0).iter().zip(reg.vertex(1)).map(|(a, b)| a + b).collect::<Vec<_>>()).unwrap();
    assert_eq!(reg.voronoi_assign(mid.as_slice()), 0);
}

#[test]
fn circumcenters_lie_on_all_other_cells() {
    let mut r = rng(7);
    for d in [3, 4, 5, 6] {
        for _ in 0..10 {
            let s = EuclideanSimplex::random_covering(d, r.next_u64()).unwrap();
            let cs = s.circumcenters().unwrap();
            for (i, c) in cs.iter().enumerate() {
                let vals: Vec<f64> = (0..=d).filter(|&j| j != i).map(|j| dot(c.as_slice(), s.vertex(j))).collect();
                let spread = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - vals.iter().cloned().fold(f64::INFINITY, f64::min);
                assert!(spread < 1e-9, "d={d} face {i}: {spread}");
            }
        }
    }
    let e = |k: usize| {
        let mut v = vec![0.0; 3];
        v[k] = 1.0;
        v
    };
    let fourth = project(&[-1.0, -1.0, -1.0]).unwrap().into_inner();
    let s = EuclideanSimplex::relaxed(vec![e(0), e(1), e(2), fourth]).unwrap();
    let c = &s.circumcenters().unwrap()[3];
    for k in 0..3 {
        assert!((c[k] - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }
}

#[test]
fn regularity_of_perturbed_simplex_is_first_order() {
    for d in [3, 4, 6] {
        for eps in [1e-3, 1e-2, 0.1, 0.3] {
            let s = EuclideanSimplex::perturbed_regular(d, eps).unwrap();
            let dist = s.regularity_distance();
            assert!(dist > 0.0 && dist <= 4.0 * eps, "d={d} eps={eps}: {dist}");
        }
        let reg = EuclideanSimplex::regular(d).unwrap();
        assert!(reg.regularity_distance() < 1e-9);
        let rotated = reg.transformed(&random_orthogonal(d, 1)).unwrap();
        assert!(rotated.regularity_distance() < 1e-9);
    }
}

#[test]
fn spherical_simplex_examples() {
    let gens = vec![vec![1.0, 0.2, 0.0], vec![0.0, 1.0, 0.3], vec![0.1, 0.0, 1.0]];
    let ss = SphericalSimplex::from_rows(&gens).unwrap();
    for g in ss.generators() {
        assert!(ss.contains(g));
        assert!(!ss.contains(&g.neg()));
    }
    let mean: Vec<f64> = (0..3).map(|k| ss.generators().iter().map(|g| g[k]).sum()).collect();
    assert!(ss.contains(&project(&mean).unwrap()));
}

#[test]
fn voronoi_cells_partition_the_sphere() {
    let mut r = rng(9);
    for d in [3, 5] {
        let s = EuclideanSimplex::random_covering(d, r.next_u64()).unwrap();
        let stream = SampleStream::iid(d, 1_000_000, 4).unwrap();
        let counts = stream.fold(
            || vec![0u64; d + 1],
            |c, x| c[s.voronoi_assign(x)] += 1,
            |a, b| a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
        );
        assert!(counts.iter().all(|&c| c > 0));
        assert_eq!(counts.iter().sum::<u64>(), 1_000_000);
    }
}

#[test]
fn voronoi_cells_are_spherical_simplexes() {
    let mut r = rng(10);
    for d in [3, 4, 5] {
        for _ in 0..3 {
            let s = EuclideanSimplex::random_covering(d, r.next_u64()).unwrap();
            let cs = s.circumcenters().unwrap();
            let cells: Vec<SphericalSimplex> = (0..=d)
                .map(|i| SphericalSimplex::new((0..=d).filter(|&j| j != i).map(|j| cs[j].clone()).collect()).unwrap())
                .collect();
            let stream = SampleStream::iid(d, 50_000, r.next_u64()).unwrap();
            stream.fold(
                || (),
                |_, x| {
                    let i = s.voronoi_assign(x);
                    let coords = cells[i].cone_coordinates(x);
                    assert!(coords.iter().all(|c| *c >= -1e-8), "{coords:?}");
                },
                |_, _| (),
            );
        }
    }
}

proptest! {
    #[test]
    fn support_is_lipschitz(seed in 0u64..10_000, d in 3usize..7) {
        let mut r = rng(seed);
        let s = EuclideanSimplex::random_covering(d, seed).unwrap();
        for _ in 0..20 {
            let (x, y) = (unit(&mut r, d), unit(&mut r, d));
            prop_assert!((s.support(&x) - s.support(&y)).abs() <= dist(&x, &y) + 1e-15);
        }
    }

    #[test]
    fn regularity_is_invariant(seed in 0u64..10_000, d in 3usize..7) {
        let s = EuclideanSimplex::random_covering(d, seed).unwrap();
        let base = s.regularity_distance();
        let mut perm: Vec<usize> = (0..=d).collect();
        perm.rotate_left((seed as usize) % (d + 1));
        perm.swap(0, d);
        prop_assert!((s.permuted(&perm).unwrap().regularity_distance() - base).abs() < 1e-12);
        let q = random_orthogonal(d, seed ^ 0xabc);
        prop_assert!((s.transformed(&q).unwrap().regularity_distance() - base).abs() < 1e-12);
    }

    #[test]
    fn unit_vectors_round_trip(v in prop::collection::vec(-1.0f64..1.0, 3..8)) {
        prop_assume!(v.iter().map(|x| x * x).sum::<f64>() > 1e-3);
        let u = project(&v).unwrap();
        prop_assert!(UnitVector::new(u.as_slice().to_vec()).is_ok());
    }
}
