//! The eigensolver on its own: lowest levels of the plain oscillator.
//!
//! Discretizes x²/2 with the three-point Laplacian and bisects on Sturm
//! counts. No construction machinery involved; this is the oracle the
//! other examples lean on.

use spectra_forge::{discretize, lowest_eigenvalues, Grid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in [501usize, 1001, 2001] {
        let grid = Grid::symmetric(10.0, n)?;
        let op = discretize(&|x: f64| 0.5 * x * x, &grid)?;
        let evs = lowest_eigenvalues(&op, 5)?;
        print!("n = {n:5}:");
        for (k, e) in evs.iter().enumerate() {
            print!("  {e:.6} (err {:.1e})", (e - (k as f64 + 0.5)).abs());
        }
        println!();
    }
    println!("error falls as h^2, the signature of the three-point stencil");
    Ok(())
}
