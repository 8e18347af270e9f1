//! Reassigning directions to vertices never beats the nearest-vertex rule.

use simplex_meanwidth::ascent::{verify_switch_point, verify_switch_region};
use simplex_meanwidth::centroid::{centroid, Region};
use simplex_meanwidth::simplex::EuclideanSimplex;
use simplex_meanwidth::sphere::UnitVector;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let simplex = EuclideanSimplex::random_covering(3, 21)?;
    let (n, seed) = (200_000, 9);

    let voronoi = verify_switch_region(&simplex, |x| simplex.voronoi_assign(x), n, seed)?;
    println!("voronoi:   {:.6} vs {:.6}", voronoi.lhs, voronoi.rhs);
    let by_octant = verify_switch_region(&simplex, |x| (x[0] > 0.0) as usize + 2 * (x[1] > 0.0) as usize, n, seed)?;
    println!("octants:   {:.6} vs {:.6}", by_octant.lhs, by_octant.rhs);

    let cap = Region::cap(&UnitVector::new(vec![0.0, 0.6, 0.8])?, 0.3);
    let g = centroid(&cap, 3, n, seed)?.centroid;
    let at_g = verify_switch_point(&cap, &g, n, seed)?;
    let elsewhere = verify_switch_point(&cap, &UnitVector::new(vec![1.0, 0.0, 0.0])?, n, seed)?;
    println!("cap at its centroid: {:.6} vs {:.6}", at_g.lhs, at_g.rhs);
    println!("cap at e_1:          {:.6} vs {:.6}", elsewhere.lhs, elsewhere.rhs);
    Ok(())
}
