//! Centroid ascent from a random covering simplex towards the regular one.

use simplex_meanwidth::ascent::{ascend_with, AscentOptions};
use simplex_meanwidth::simplex::EuclideanSimplex;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dim = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(3);
    let start = EuclideanSimplex::random_covering(dim, 5)?;
    let options = AscentOptions { n_samples: 200_000, seed: 5, ..Default::default() };
    let trajectory = ascend_with(&start, &options)?;

    println!("iter  mean width   regularity   movement");
    for step in &trajectory.steps {
        println!(
            "{:>4}  {:.6}   {:.3e}   {:.3e}",
            step.iteration, step.report.total.value, step.regularity_distance, step.movement
        );
    }
    let regular = EuclideanSimplex::regular(dim)?;
    println!("converged: {}  (regular simplex regularity {:.1e})", trajectory.converged, regular.regularity_distance());
    Ok(())
}
