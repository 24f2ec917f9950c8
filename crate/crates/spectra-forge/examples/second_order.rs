//! Insert two levels at once, one of them inside the ladder gap.
//!
//! The pair (ε₁, ε₂) = (0.4, −0.5) with ν₂ = 10⁴ places one level just
//! under the ladder bottom and one below it; the ν gate |ν₁| < 1 < |ν₂|
//! keeps the intermediate factorization nonsingular even though each
//! carrier alone would have nodes.

use spectra_forge::{
    predict_spectrum, second_order_potential, verify_spectrum, FactorizationConfig, Grid,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f1 = FactorizationConfig::new(0.4, 0.0)?;
    let f2 = FactorizationConfig::new(-0.5, 10000.0)?;
    let v = second_order_potential(f1, f2)?;

    println!("two-step potential, eps1 = 0.4, eps2 = -0.5, nu2 = 1e4");
    for x in [-2.0, -0.5, 0.0, 0.5, 2.0] {
        println!("  V({x:+.1}) = {:+.12}", v.value(x)?);
    }

    let pred = predict_spectrum(v.spec(), 3);
    let grid = Grid::symmetric(10.0, 4001)?;
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
