//! Two inserted levels combined with a coordinate stretch.
//!
//! q₁ = √2 halves every energy: the pair (ε₁, ε₂) = (−1, −3/2) lands at
//! (−1/2, −3/4) and the ladder runs 1/4, 3/4, 5/4, …

use std::f64::consts::SQRT_2;

use spectra_forge::{
    predict_spectrum, scaled_second_potential, verify_spectrum, FactorizationConfig, Grid,
    ScalingParam,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f1 = FactorizationConfig::new(-1.0, 0.0)?;
    let f2 = FactorizationConfig::new(-1.5, 1.1)?;
    let v = scaled_second_potential(f1, ScalingParam::new(SQRT_2)?, f2, ScalingParam::identity())?;

    println!("scaled two-step, q1 = sqrt(2), eps1 = -1, eps2 = -3/2, nu2 = 1.1");
    println!("energy scale = {:.6}", v.spec().energy_scale());

    let pred = predict_spectrum(v.spec(), 3);
    let grid = Grid::symmetric(10.0, 2001)?;
    let rep = verify_spectrum(&pred, &v, &grid, 2e-3)?;
    println!("levels (predicted / computed / |err|):");
    for (l, (c, e)) in pred
        .levels()
        .iter()
        .zip(rep.computed.iter().zip(&rep.abs_errors))
    {
        println!("  {:+.6}  {c:+.6}  {e:.2e}  [{}]", l.value, l.label);
    }
    println!("pass = {}", rep.pass);
    Ok(())
}
