//! Ratio of strip integrals before and after a small shear.

use simplex_meanwidth::centroid::{strip_ratio_experiment, ExperimentOptions};
use simplex_meanwidth::simplex::SphericalSimplex;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let triangle = SphericalSimplex::from_rows(&[
        vec![1.0, -0.3, -0.5],
        vec![1.0, 0.6, -0.4],
        vec![1.0, 0.1, 0.7],
    ])?;
    let r = strip_ratio_experiment(&triangle, 0.1, 0.2, 0.25, 2_000_000, 3, ExperimentOptions::default())?;
    println!("integrals [S_lo, T_lo, S_hi, T_hi] = {:.6?}", r.integrals);
    println!("ratios left {:.4} ± {:.4}  right {:.4} ± {:.4}", r.ratios[0], r.ratio_std_errors[0], r.ratios[1], r.ratio_std_errors[1]);
    println!("difference {:.4} ± {:.4}: {}", r.difference, r.difference_std_error, r.verdict);
    Ok(())
}
