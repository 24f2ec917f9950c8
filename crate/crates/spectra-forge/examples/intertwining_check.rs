//! Certify the operator identity behind each construction.
//!
//! For a potential built here there is an operator B with H̃B = c·BH₀,
//! c the energy scale. The residual max|H̃(Bφ) − c·B(H₀φ)| over Gaussian
//! probes is a direct, eigensolver-free check of the construction; it
//! should sit at rounding level for all four kinds.

use std::f64::consts::SQRT_2;

use spectra_forge::transforms::{intertwining_residual, GaussianTest};
use spectra_forge::{FactorizationConfig, ScalingParam, TransformSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let probes: Vec<f64> = (0..50).map(|i| -4.0 + 8.0 * i as f64 / 49.0).collect();
    let gauss = GaussianTest::new(0.3, 1.0);

    let f1 = FactorizationConfig::new(-1.0, 0.5)?;
    let fa = FactorizationConfig::new(0.4, 0.0)?;
    let fb = FactorizationConfig::new(-0.5, 10000.0)?;
    let fc = FactorizationConfig::new(-1.0, 0.0)?;
    let fd = FactorizationConfig::new(-1.5, 1.1)?;
    let root2 = ScalingParam::new(SQRT_2)?;

    let specs = [
        ("first-order", TransformSpec::first_order(f1)),
        ("scaled-first", TransformSpec::scaled_first(fc, root2)),
        ("second-order", TransformSpec::second_order(fa, fb)?),
        (
            "scaled-second",
            TransformSpec::scaled_second(fc, root2, fd, ScalingParam::identity())?,
        ),
    ];
    for (name, spec) in &specs {
        let r = intertwining_residual(spec, &gauss, &probes)?;
        println!("{name:>13}: residual = {r:.3e}");
    }
    Ok(())
}
