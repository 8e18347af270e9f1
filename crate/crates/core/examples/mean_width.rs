//! Mean width of a few inscribed simplexes, with the per-vertex split.

use simplex_meanwidth::meanwidth::{mean_width_cells, mean_width_mc};
use simplex_meanwidth::simplex::EuclideanSimplex;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 1_000_000;
    for dim in 3..=6 {
        let regular = EuclideanSimplex::regular(dim)?;
        let random = EuclideanSimplex::random_covering(dim, 11)?;
        let w_reg = mean_width_mc(&regular, n, 1)?;
        let w_rand = mean_width_mc(&random, n, 1)?;
        println!(
            "d={dim}  regular {:.5} ± {:.5}   random covering {:.5} ± {:.5}",
            w_reg.value, w_reg.std_error, w_rand.value, w_rand.std_error
        );
    }

    let simplex = EuclideanSimplex::random_covering(3, 11)?;
    let report = mean_width_cells(&simplex, n, 1)?;
    println!("\ncells of a random covering tetrahedron:");
    for (i, cell) in report.per_cell.iter().enumerate() {
        println!("  v{i}: measure {:.4}  contribution {:.5}", report.cell_measures[i], cell.value);
    }
    println!("  total {:.5}", report.total.value);
    Ok(())
}
