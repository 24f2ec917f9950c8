//! Library-level parameter sweep: walk q₁ with ε₁ locked to −q₁²/2.
//!
//! The inserted level stays pinned at −1/2 while the inherited ladder
//! stretches; the same effect is available from the command line as
//! `spectra-forge sweep --param q1 --lock "eps1=-q1^2/2" ...`.

use spectra_forge::{
    predict_spectrum, scaled_first_potential, verify_spectrum, FactorizationConfig, Grid,
    ScalingParam,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::symmetric(10.0, 2001)?;
    let steps = 7;
    let (lo, hi) = (1.0 / 2.0_f64.sqrt(), 2.0_f64.sqrt());
    println!("{:>10} {:>10} {:>40}", "q1", "eps1", "computed levels");
    for i in 0..steps {
        let q = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
        let eps1 = -q * q / 2.0;
        let v =
            scaled_first_potential(FactorizationConfig::new(eps1, 0.0)?, ScalingParam::new(q)?)?;
        let pred = predict_spectrum(v.spec(), 3);
        let tol = if v.spec().energy_scale() >= 1.5 {
            4e-3
        } else {
            2e-3
        };
        let rep = verify_spectrum(&pred, &v, &grid, tol)?;
        print!("{q:>10.6} {eps1:>10.4}  ");
        for c in &rep.computed {
            print!(" {c:>9.4}");
        }
        println!("  pass={}", rep.pass);
    }
    Ok(())
}
