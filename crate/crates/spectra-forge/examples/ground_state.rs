//! Closed-form ground state of a one-step potential.
//!
//! The inserted level's wavefunction is ψ ∝ exp(−∫α₁); the example prints
//! its energy, a few samples, and a finite-difference Rayleigh quotient as
//! a cross-check.

use spectra_forge::{first_order_potential, ground_state_fn, FactorizationConfig, Grid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f1 = FactorizationConfig::new(-1.0, 0.3)?;
    let spec = *first_order_potential(f1)?.spec();
    let grid = Grid::symmetric(8.0, 1601)?;
    let psi = ground_state_fn(&spec, &grid)?;

    println!("ground state of the eps1 = -1, nu1 = 0.3 potential");
    println!("energy = {:+.12}", psi.energy());
    for x in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let i = ((x - grid.x_min()) / grid.spacing()).round() as usize;
        println!("  psi({x:+.1}) = {:.10}", psi.samples()[i]);
    }

    // Rayleigh quotient <psi|H|psi> with a central second difference
    let v = first_order_potential(f1)?;
    let h = grid.spacing();
    let s = psi.samples();
    let n = s.len();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 1..n - 1 {
        let x = grid.point(i);
        let lap = (s[i - 1] - 2.0 * s[i] + s[i + 1]) / (h * h);
        num += s[i] * (-0.5 * lap + v.value(x)? * s[i]) * h;
        den += s[i] * s[i] * h;
    }
    println!(
        "rayleigh quotient = {:+.8} (expect {:+.1})",
        num / den,
        -1.0
    );
    Ok(())
}
