//! The longitudinal shear of the sphere: images, Jacobians and the
//! pushforward of the uniform measure.

use simplex_meanwidth::estimate::Moments;
use simplex_meanwidth::shear::ShearMap;
use simplex_meanwidth::sphere::{SampleStream, UnitVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = ShearMap::new(0.5, 3)?;
    let x = UnitVector::new(vec![0.6, 0.0, 0.8])?;
    let y = f.apply(&x);
    println!("f_0.5({:?}) = {:?}", x.as_slice(), y.as_slice());
    println!("Jacobian at x: {:.6}", f.jacobian(&x));
    println!("round trip error: {:.1e}", {
        let back = f.inverse().apply(&y);
        back.as_slice().iter().zip(x.as_slice()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    });

    // the density of f_s(μ) integrates to one
    let stream = SampleStream::iid(3, 1_000_000, 2)?;
    let mass = stream.fold(
        Moments::default,
        |m, p| m.push(f.pushforward_density_raw(p)),
        |a, b| a.merge(b),
    );
    let est = mass.estimate(1.0, 2);
    println!("∫ Df_(-s) dμ = {:.5} ± {:.5}", est.value, est.std_error);

    // the pole of a great circle moves with the map
    let pole = UnitVector::new(vec![0.0, 0.0, 1.0])?;
    let equator_point = UnitVector::new(vec![0.6, 0.8, 0.0])?;
    println!("image of equator point · image pole = {:.1e}", f.apply(&equator_point).dot(&f.map_pole(&pole)));
    Ok(())
}
