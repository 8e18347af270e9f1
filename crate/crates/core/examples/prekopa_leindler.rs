//! Spherical Prékopa–Leindler on the circle and on the 2-sphere.

use simplex_meanwidth::inequalities::{spl_verify, SphereFunction, SphereGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let circle = SphereGrid::circle(2048)?;
    let f = SphereFunction::from_fn(circle, |p| (2.0 * p[0]).exp())?;
    let g = SphereFunction::from_fn(circle, |p| (1.0 + p[1] * p[1]).recip())?;
    for lambda in [0.25, 0.5, 0.75] {
        let r = spl_verify(&f, &g, lambda, 1e-2)?;
        println!("circle  λ={lambda}: ∫h = {:.5}  bound {:.5}  holds {}", r.lhs, r.rhs, r.holds);
    }

    let sphere = SphereGrid::sphere(16)?;
    let f = SphereFunction::from_fn(sphere, |p| (p[2] - 0.5 * p[0]).exp())?;
    let g = SphereFunction::from_fn(sphere, |p| 1.0 + p[0] * p[0])?;
    let r = spl_verify(&f, &g, 0.5, 1e-2)?;
    println!("sphere  λ=0.5: ∫h = {:.5}  bound {:.5}  holds {}", r.lhs, r.rhs, r.holds);
    Ok(())
}
