//! Stretch the one-step construction and watch a double well appear.
//!
//! With the lock ε₁ = −q²/2 the inserted level sits at −1/2 for every q
//! while the ladder spacing moves as q⁻². At q = 1/√2 the potential
//! develops two separate minima.

use std::f64::consts::FRAC_1_SQRT_2;

use spectra_forge::{
    predict_spectrum, scaled_first_potential, verify_spectrum, FactorizationConfig, Grid,
    ScalingParam,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::symmetric(10.0, 2001)?;
    for q in [FRAC_1_SQRT_2, 1.0, 2.0_f64.sqrt()] {
        let f1 = FactorizationConfig::new(-q * q / 2.0, 0.0)?;
        let v = scaled_first_potential(f1, ScalingParam::new(q)?)?;
        let pred = predict_spectrum(v.spec(), 4);
        let tol = if q < 1.0 { 4e-3 } else { 2e-3 };
        let rep = verify_spectrum(&pred, &v, &grid, tol)?;

        // count strict interior minima on a fine sample
        let n = 1001;
        let xs: Vec<f64> = (0..n)
            .map(|i| -5.0 + 10.0 * i as f64 / (n - 1) as f64)
            .collect();
        let vals: Vec<f64> = xs.iter().map(|&x| v.value(x)).collect::<Result<_, _>>()?;
        let minima = (1..n - 1)
            .filter(|&i| vals[i] < vals[i - 1] && vals[i] < vals[i + 1])
            .count();

        println!("q = {q:.6}  (eps1 locked to {:+.4})", f1.eps());
        println!("  wells = {minima}");
        print!("  levels:");
        for c in &rep.computed {
            print!(" {c:+.4}");
        }
        println!("  pass = {}", rep.pass);
    }
    Ok(())
}
