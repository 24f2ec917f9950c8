//! Cross-check the closed-form α against direct integration.
//!
//! The numeric backend integrates H₀ψ = εψ outward from the origin with
//! the slope that selects the nodeless branch, then forms α = ψ′/ψ. Both
//! backends must agree and both must leave a tiny Riccati residual.

use spectra_forge::riccati::OscillatorAlpha;
use spectra_forge::{alpha_numeric, alpha_oscillator, riccati_residual, FactorizationConfig, Grid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = FactorizationConfig::new(-1.0, 0.4)?;
    let ana = OscillatorAlpha::new(cfg)?;
    let grid = Grid::symmetric(5.0, 10001)?;
    let num = alpha_numeric(
        |x: f64| 0.5 * x * x,
        cfg.eps(),
        ana.slope_at_origin(),
        &grid,
    )?;

    println!("eps = -1, nu = 0.4");
    println!(
        "{:>6} {:>18} {:>18} {:>10} {:>10}",
        "x", "alpha (closed)", "alpha (rk4)", "diff", "residual"
    );
    let mut worst = 0.0_f64;
    for i in 0..=8 {
        let x = -4.0 + i as f64;
        let (a_ana, _) = alpha_oscillator(x, &cfg)?;
        let (a_num, _) = num.eval(x)?;
        let res = riccati_residual(&num, x)?;
        worst = worst.max((a_ana - a_num).abs());
        println!(
            "{x:>6.1} {a_ana:>18.12} {a_num:>18.12} {:>10.2e} {res:>10.2e}",
            (a_ana - a_num).abs()
        );
    }
    println!("max backend difference = {worst:.2e}");
    Ok(())
}
