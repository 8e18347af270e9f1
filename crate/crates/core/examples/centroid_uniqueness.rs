//! Slope of the centroid of a sheared spherical simplex as the shear grows.

use simplex_meanwidth::centroid::centroid_uniqueness_experiment;
use simplex_meanwidth::simplex::SphericalSimplex;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let simplex = SphericalSimplex::from_rows(&[
        vec![0.0, -0.3, 1.0, 0.2],
        vec![0.0, 0.4, -0.2, 1.0],
        vec![0.0, 0.2, -1.0, -0.6],
        vec![1.0, 0.1, 0.2, 0.1],
    ])?;
    let s_values: Vec<f64> = (0..=8).map(|k| 0.025 * k as f64).collect();
    let r = centroid_uniqueness_experiment(&simplex, &s_values, 1_000_000, 4)?;
    for e in &r.entries {
        println!("s = {:.3}  slope {:.5} ± {:.5}", e.s, e.slope, e.slope_std_error);
    }
    println!("verdict: {}", r.verdict);
    Ok(())
}
