//! Conditions every mean-width maximizer satisfies, checked on a few
//! simplexes, plus the equal-split property of circumcenters.

use simplex_meanwidth::ascent::check_necessary_conditions;
use simplex_meanwidth::simplex::EuclideanSimplex;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let candidates = [
        ("regular", EuclideanSimplex::regular(4)?),
        ("perturbed", EuclideanSimplex::perturbed_regular(4, 0.3)?),
        ("random covering", EuclideanSimplex::random_covering(4, 8)?),
    ];
    for (name, s) in &candidates {
        let c = check_necessary_conditions(s)?;
        println!(
            "{name:>16}: enclosing radius {:.6}  covers {}  regularity {:.4}  all {}",
            c.enclosing_ball.radius,
            c.covers_sphere,
            s.regularity_distance(),
            c.all()
        );
    }

    let regular = &candidates[0].1;
    let centers = regular.circumcenters()?;
    println!("\nface circumcenters of the regular simplex are the negated vertices:");
    for (i, c) in centers.iter().enumerate() {
        let err: f64 = c.as_slice().iter().zip(regular.vertex(i)).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max);
        println!("  face {i}: deviation {err:.1e}");
    }
    Ok(())
}
