//! Randomized property suites behind `smw verify`.
//!
//! Every check reports how many trials ran, how many violated the stated
//! threshold, the worst observed error, and the first counterexample.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::ascent::{verify_switch_point_with, verify_switch_region_with};
use crate::centroid::{centroid_with, Region};
use crate::error::{Error, Result};
use crate::estimate::Moments;
use crate::inequalities::{reversed_simpson_antidote, simpson_antidote, spl_verify, EightTuple, SphereFunction, SphereGrid};
use crate::shear::ShearMap;
use crate::simplex::{EuclideanSimplex, SphericalSimplex};
use crate::sphere::{derive_seed, dot, norm, project, splitmix64, SampleStream, UnitVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Shear,
    Lemma,
    Spl,
    Switch,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Shear => "shear",
            Suite::Lemma => "lemma",
            Suite::Spl => "spl",
            Suite::Switch => "switch",
        }
    }

    pub fn default_trials(self) -> u64 {
        match self {
            Suite::Shear => 10_000,
            Suite::Lemma => 1_000_000,
            Suite::Spl => 100,
            Suite::Switch => 1_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub dim: usize,
    /// Randomized trials per check; `None` uses the suite default.
    pub trials: Option<u64>,
    /// Samples behind each Monte Carlo check.
    pub n_samples: u64,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { dim: 3, trials: None, n_samples: 1_000_000, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: String,
    pub trials: u64,
    pub violations: u64,
    /// Largest observed error (in the check's own units).
    pub worst: f64,
    pub threshold: f64,
    pub counterexample: Option<serde_json::Value>,
}

impl CheckResult {
    fn new(check: &str, threshold: f64) -> Self {
        Self { check: check.into(), trials: 0, violations: 0, worst: 0.0, threshold, counterexample: None }
    }

    /// Records an error value; `err <= threshold` passes.
    fn record(&mut self, err: f64, witness: impl FnOnce() -> serde_json::Value) {
        self.record_pass(err, err <= self.threshold, witness);
    }

    fn record_pass(&mut self, err: f64, pass: bool, witness: impl FnOnce() -> serde_json::Value) {
        self.trials += 1;
        if err.is_nan() || err > self.worst {
            self.worst = err;
        }
        if !pass {
            self.violations += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(witness());
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub config: SuiteConfig,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn violations(&self) -> u64 {
        self.checks.iter().map(|c| c.violations).sum()
    }

    pub fn passed(&self) -> bool {
        self.violations() == 0
    }
}

pub fn run_suite(suite: Suite, config: &SuiteConfig) -> Result<SuiteReport> {
    if config.dim < 3 {
        return Err(Error::DimensionTooSmall { dim: config.dim });
    }
    let trials = config.trials.unwrap_or(suite.default_trials());
    if trials == 0 || config.n_samples == 0 {
        return Err(Error::InvalidParameter("trials and samples must be positive".into()));
    }
    let checks = match suite {
        Suite::Shear => shear_suite(config.dim, trials, config.n_samples, config.seed)?,
        Suite::Lemma => lemma_suite(trials, config.seed)?,
        Suite::Spl => spl_suite(trials, config.seed)?,
        Suite::Switch => switch_suite(config.dim, trials, config.n_samples, config.seed)?,
    };
    Ok(SuiteReport { suite, config: *config, checks })
}

fn gaussian_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        if let Ok(u) = project(&z) {
            return u.into_inner();
        }
    }
}

/// A uniform point on the great sphere with pole `p`.
fn on_great_sphere(rng: &mut ChaCha8Rng, p: &[f64]) -> Vec<f64> {
    loop {
        let z = gaussian_unit(rng, p.len());
        let c = dot(&z, p);
        let t: Vec<f64> = z.iter().zip(p).map(|(a, b)| a - c * b).collect();
        if let Ok(u) = project(&t) {
            return u.into_inner();
        }
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Orthonormal basis of the tangent space at unit `x`, as columns.
fn tangent_frame(x: &[f64]) -> DMatrix<f64> {
    let d = x.len();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    for k in 0..d {
        let mut v = vec![0.0; d];
        v[k] = 1.0;
        let c = dot(&v, x);
        v.iter_mut().zip(x).for_each(|(a, b)| *a -= c * b);
        for u in &cols {
            let c = dot(&v, u);
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
        }
        let n = norm(&v);
        if n > 1e-6 {
            cols.push(v.iter().map(|a| a / n).collect());
        }
        if cols.len() == d - 1 {
            break;
        }
    }
    DMatrix::from_fn(d, d - 1, |r, c| cols[c][r])
}

/// Surface Jacobian of `f_s` at `x` by central differences along a tangent
/// frame, projected onto a tangent frame at `f_s(x)`.
pub fn finite_difference_jacobian(shear: &ShearMap, x: &[f64], h: f64) -> f64 {
    let d = x.len();
    let frame = tangent_frame(x);
    let y = shear.apply_raw(x);
    let out = tangent_frame(&y);
    let mut diff = DMatrix::zeros(d, d - 1);
    for c in 0..d - 1 {
        let step = |sign: f64| {
            let p: Vec<f64> = (0..d).map(|r| x[r] + sign * h * frame[(r, c)]).collect();
            shear.apply_raw(project(&p).expect("nonzero").as_slice())
        };
        let (plus, minus) = (step(1.0), step(-1.0));
        for r in 0..d {
            diff[(r, c)] = (plus[r] - minus[r]) / (2.0 * h);
        }
    }
    (out.transpose() * diff).determinant().abs()
}

fn shear_suite(dim: usize, trials: u64, n_samples: u64, seed: u64) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s_range = |rng: &mut ChaCha8Rng| rng.random_range(-2.0..=2.0);

    let mut group = CheckResult::new("group law f_{s+t} = f_s f_t", 1e-12);
    let mut inverse = CheckResult::new("inverse f_{-s} f_s = id", 1e-12);
    let mut poles = CheckResult::new("pole transport", 1e-12);
    let mut chain = CheckResult::new("jacobian chain rule", 1e-10);
    for _ in 0..trials {
        let x = gaussian_unit(&mut rng, dim);
        let (s, t) = (s_range(&mut rng), s_range(&mut rng));
        let (fs, ft, fst) = (ShearMap::new(s, dim)?, ShearMap::new(t, dim)?, ShearMap::new(s + t, dim)?);
        let err = max_abs_diff(&fst.apply_raw(&x), &fs.apply_raw(&ft.apply_raw(&x)));
        group.record(err, || json!({"x": x, "s": s, "t": t, "error": err}));

        let err = max_abs_diff(&fs.inverse().apply_raw(&fs.apply_raw(&x)), &x);
        inverse.record(err, || json!({"x": x, "s": s, "error": err}));

        let p = UnitVector::from_normalized(gaussian_unit(&mut rng, dim));
        let on = on_great_sphere(&mut rng, p.as_slice());
        let err = dot(&fs.apply_raw(&on), fs.map_pole(&p).as_slice()).abs();
        poles.record(err, || json!({"pole": p, "x": on, "s": s, "error": err}));

        let err = (fs.jacobian_raw(&x) * fs.inverse().jacobian_raw(&fs.apply_raw(&x)) - 1.0).abs();
        chain.record(err, || json!({"x": x, "s": s, "error": err}));
    }

    let mut planes = CheckResult::new("great spheres map to great spheres", 1e-10);
    for _ in 0..trials.div_ceil(10) {
        let p = gaussian_unit(&mut rng, dim);
        let sh = ShearMap::new(s_range(&mut rng), dim)?;
        let images = DMatrix::from_fn(100, dim, |_, _| 0.0);
        let mut images = images;
        for r in 0..100 {
            let y = sh.apply_raw(&on_great_sphere(&mut rng, &p));
            for c in 0..dim {
                images[(r, c)] = y[c];
            }
        }
        let sigma = images.singular_values().min();
        planes.record(sigma, || json!({"pole": p, "s": sh.s, "sigma_min": sigma}));
    }

    let mut fd = CheckResult::new("jacobian vs finite differences (relative)", 1e-5);
    for _ in 0..trials.min(1_000) {
        let x = gaussian_unit(&mut rng, dim);
        let sh = ShearMap::new(s_range(&mut rng), dim)?;
        let exact = sh.jacobian_raw(&x);
        let approx = finite_difference_jacobian(&sh, &x, 1e-5);
        let err = (approx - exact).abs() / exact;
        fd.record(err, || json!({"x": x, "s": sh.s, "exact": exact, "finite_difference": approx}));
    }

    let mut simplexes = CheckResult::new("spherical simplexes map to spherical simplexes", 0.0);
    for _ in 0..trials.div_ceil(100) {
        let gens: Vec<Vec<f64>> = (0..dim).map(|_| gaussian_unit(&mut rng, dim)).collect();
        let ss = match SphericalSimplex::from_rows(&gens) {
            Ok(ss) => ss,
            Err(_) => continue,
        };
        let sh = ShearMap::new(s_range(&mut rng), dim)?;
        let image_gens: Vec<Vec<f64>> = gens.iter().map(|g| sh.apply_raw(project(g).unwrap().as_slice())).collect();
        let image = match SphericalSimplex::from_rows(&image_gens) {
            Ok(ss) => ss,
            Err(_) => continue,
        };
        for _ in 0..100 {
            let x = gaussian_unit(&mut rng, dim);
            let coords = ss.cone_coordinates(&x);
            let margin = coords.iter().fold(f64::INFINITY, |m, c| m.min(c.abs()));
            if margin < 1e-8 {
                continue;
            }
            let mismatch = ss.contains_raw(&x) != image.contains_raw(&sh.apply_raw(&x));
            simplexes.record(mismatch as u8 as f64, || json!({"generators": gens, "s": sh.s, "x": x}));
        }
    }

    let mut mass = CheckResult::new("pushforward mass = 1 (z-score)", 3.0);
    let mut cov = CheckResult::new("change of variables for x_1^2 (z-score)", 3.0);
    for (k, &s) in [-1.0, -0.3, 0.2, 0.7, 1.5].iter().enumerate() {
        let sh = ShearMap::new(s, dim)?;
        let stream = SampleStream::iid(dim, n_samples, derive_seed(seed, 1000 + k as u64))?;
        let (m, d) = stream.fold(
            || (Moments::default(), Moments::default()),
            |(m, d), x| {
                let density = sh.pushforward_density_raw(x);
                m.push(density);
                let y = sh.apply_raw(x);
                d.push(y[0] * y[0] - x[0] * x[0] * density);
            },
            |a, b| {
                a.0.merge(b.0);
                a.1.merge(b.1);
            },
        );
        let (em, ed) = (m.estimate(1.0, stream.seed), d.estimate(1.0, stream.seed));
        let z = (em.value - 1.0).abs() / em.std_error;
        mass.record(z, || json!({"s": s, "estimate": em}));
        let z = ed.value.abs() / ed.std_error;
        cov.record(z, || json!({"s": s, "difference": ed}));
    }

    Ok(vec![group, inverse, planes, poles, fd, chain, simplexes, mass, cov])
}

fn random_tuple(rng: &mut ChaCha8Rng) -> EightTuple {
    let mut v = || rng.random_range(-2.0..2.0);
    let (a, b) = ([v(), v()], [v(), v()]);
    let mut w = || rng.random_range(-3.0f64..3.0).exp();
    EightTuple { a, b, alpha: [w(), w()], beta: [w(), w()] }
}

fn lemma_suite(trials: u64, seed: u64) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut identity = CheckResult::new("decomposition identity (relative residual)", 1e-12);
    let mut forward = CheckResult::new("hypothesis implies conclusion", 0.0);
    let mut reversed = CheckResult::new("reversed hypothesis implies conclusion", 0.0);
    for _ in 0..trials {
        let t = random_tuple(&mut rng);
        let c = simpson_antidote(&t)?;
        identity.record(c.identity_residual, || json!({"tuple": t, "check": c}));
        if c.hypothesis_holds {
            forward.record(c.is_counterexample() as u8 as f64, || json!({"tuple": t, "check": c}));
        }
        let r = reversed_simpson_antidote(&t)?;
        identity.record(r.identity_residual, || json!({"tuple": t, "check": r}));
        if r.hypothesis_holds {
            reversed.record(r.is_counterexample() as u8 as f64, || json!({"tuple": t, "check": r}));
        }
    }
    Ok(vec![identity, forward, reversed])
}

/// `exp` of a random trigonometric polynomial of degree 4 on the circle.
fn smooth_circle_function(rng: &mut ChaCha8Rng, grid: SphereGrid) -> Result<SphereFunction> {
    let coeffs: Vec<(f64, f64)> = (1..=4)
        .map(|k| {
            let scale = 1.0 / k as f64;
            (scale * rng.sample::<f64, _>(StandardNormal), scale * rng.sample::<f64, _>(StandardNormal))
        })
        .collect();
    let shift: f64 = rng.sample(StandardNormal);
    SphereFunction::from_fn(grid, |p| {
        let phi = p[1].atan2(p[0]);
        let s: f64 = coeffs.iter().enumerate().map(|(k, (a, b))| {
            let kf = (k + 1) as f64;
            a * (kf * phi).cos() + b * (kf * phi).sin()
        }).sum();
        (s + shift).exp()
    })
}

/// `exp` of a random quadratic form on `S^2`.
fn smooth_sphere_function(rng: &mut ChaCha8Rng, grid: SphereGrid) -> Result<SphereFunction> {
    let lin: Vec<f64> = (0..3).map(|_| rng.sample(StandardNormal)).collect();
    let quad: Vec<f64> = (0..9).map(|_| 0.5 * rng.sample::<f64, _>(StandardNormal)).collect();
    SphereFunction::from_fn(grid, |p| {
        let mut s = dot(&lin, p);
        for i in 0..3 {
            for j in 0..3 {
                s += quad[3 * i + j] * p[i] * p[j];
            }
        }
        s.exp()
    })
}

pub const SPL_SLACK: f64 = 1e-2;
pub const SPL_CIRCLE_NODES: usize = 2048;
pub const SPL_SPHERE_LATITUDES: usize = 16;

fn spl_suite(trials: u64, seed: u64) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let circle = SphereGrid::circle(SPL_CIRCLE_NODES)?;
    let sphere = SphereGrid::sphere(SPL_SPHERE_LATITUDES)?;
    // shortfall of lhs below rhs, relative to rhs
    let mut on_circle = CheckResult::new("circle grid, lambda = 1/2 (relative shortfall)", SPL_SLACK);
    for _ in 0..trials {
        let f = smooth_circle_function(&mut rng, circle)?;
        let g = smooth_circle_function(&mut rng, circle)?;
        let r = spl_verify(&f, &g, 0.5, SPL_SLACK)?;
        let shortfall = (r.rhs - r.lhs) / r.rhs;
        on_circle.record_pass(shortfall, r.holds, || json!({"f": f.values(), "g": g.values(), "report": r}));
    }
    let mut on_sphere = CheckResult::new("2-sphere grid, random lambda (relative shortfall)", SPL_SLACK);
    let mut scaling = CheckResult::new("envelope scales as c^(1-lambda) (relative)", 1e-12);
    for _ in 0..trials.div_ceil(10) {
        let f = smooth_sphere_function(&mut rng, sphere)?;
        let g = smooth_sphere_function(&mut rng, sphere)?;
        let lambda = rng.random_range(0.1..0.9);
        let r = spl_verify(&f, &g, lambda, SPL_SLACK)?;
        let shortfall = (r.rhs - r.lhs) / r.rhs;
        on_sphere.record_pass(shortfall, r.holds, || json!({"lambda": lambda, "report": r}));

        let c = rng.random_range(0.1..10.0f64);
        let scaled = spl_verify(&f.scaled(c)?, &g, lambda, SPL_SLACK)?;
        let factor = c.powf(1.0 - lambda);
        let err = r
            .envelope
            .iter()
            .zip(&scaled.envelope)
            .map(|(a, b)| (b - factor * a).abs() / (factor * a).max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        let verdict_same = scaled.holds == r.holds;
        scaling.record_pass(err, err <= 1e-12 && verdict_same, || json!({"c": c, "lambda": lambda, "error": err}));
    }
    Ok(vec![on_circle, on_sphere, scaling])
}

fn switch_suite(dim: usize, trials: u64, n_samples: u64, seed: u64) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let simplex = EuclideanSimplex::random_covering(dim, derive_seed(seed, 1))?;
    let k = simplex.n_vertices();
    let stream = SampleStream::iid(dim, n_samples, derive_seed(seed, 2))?;

    let mut voronoi = CheckResult::new("voronoi partition gives equality", 0.0);
    let c = verify_switch_region_with(&simplex, |x| simplex.voronoi_assign(x), &stream)?;
    voronoi.record((c.rhs - c.lhs).abs(), || json!({"simplex": simplex, "check": c}));

    let mut random = CheckResult::new("random partitions never beat voronoi", 0.0);
    let mut swaps = CheckResult::new("label swaps never beat voronoi", 0.0);
    for trial in 0..trials.div_ceil(2) {
        let salt = rng.random::<u64>();
        let labels = |x: &[f64]| (splitmix64(x[0].to_bits() ^ x[1].to_bits().rotate_left(17) ^ salt) % k as u64) as usize;
        let c = verify_switch_region_with(&simplex, labels, &stream)?;
        random.record_pass(c.lhs - c.rhs, c.holds && c.lhs < c.rhs, || json!({"salt": salt, "check": c}));

        let (i, j) = (trial as usize % k, (trial as usize + 1 + rng.random_range(0..k - 1)) % k);
        let swap = |x: &[f64]| {
            let l = simplex.voronoi_assign(x);
            if l == i { j } else if l == j { i } else { l }
        };
        let c = verify_switch_region_with(&simplex, swap, &stream)?;
        let strict = i == j || c.lhs < c.rhs;
        swaps.record_pass(c.lhs - c.rhs, c.holds && strict, || json!({"swap": [i, j], "check": c}));
    }

    let mut points = CheckResult::new("centroid maximizes the switch point", 0.0);
    let mut equality = CheckResult::new("equality at the empirical centroid", 1e-12);
    for _ in 0..trials.div_ceil(2) {
        let center = UnitVector::from_normalized(gaussian_unit(&mut rng, dim));
        let height = rng.random_range(-0.5..0.9);
        let region = Region::cap(&center, height);
        let x = UnitVector::from_normalized(gaussian_unit(&mut rng, dim));
        let c = match verify_switch_point_with(&region, &x, &stream) {
            Ok(c) => c,
            Err(Error::EmptyRegion) | Err(Error::UndefinedCentroid { .. }) => continue,
            Err(e) => return Err(e),
        };
        points.record_pass(c.lhs - c.rhs, c.holds, || json!({"center": center, "height": height, "x": x, "check": c}));
        let g = centroid_with(&region, &stream)?.centroid;
        let at_g = verify_switch_point_with(&region, &g, &stream)?;
        equality.record((at_g.lhs - at_g.rhs).abs(), || json!({"center": center, "height": height, "check": at_g}));
    }
    Ok(vec![voronoi, random, swaps, points, equality])
}
