//! Insert one level below the oscillator ladder and verify the result.
//!
//! Builds V = x²/2 − α′ for ε₁ = −1, ν₁ = 0.5, prints a few samples, the
//! predicted spectrum, and the finite-difference check.

use spectra_forge::{
    first_order_potential, predict_spectrum, verify_spectrum, FactorizationConfig, Grid,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f1 = FactorizationConfig::new(-1.0, 0.5)?;
    let v = first_order_potential(f1)?;

    println!("V(x) = x^2/2 - alpha'(x) with eps1 = -1, nu1 = 0.5");
    for x in [-3.0, -1.0, 0.0, 1.0, 3.0] {
        println!("  V({x:+.1}) = {:+.12}", v.value(x)?);
    }

    let pred = predict_spectrum(v.spec(), 4);
    println!("predicted levels:");
    for l in pred.levels() {
        println!("  {:+.6}  [{}]", l.value, l.label);
    }

    let grid = Grid::symmetric(10.0, 2001)?;
    let rep = verify_spectrum(&pred, &v, &grid, 2e-3)?;
    println!("finite-difference check (tol {:.0e}):", rep.tolerance);
    for (p, (c, e)) in rep
        .predicted
        .iter()
        .zip(rep.computed.iter().zip(&rep.abs_errors))
    {
        println!("  predicted {p:+.6}  computed {c:+.6}  |err| {e:.2e}");
    }
    println!("pass = {}", rep.pass);
    Ok(())
}
