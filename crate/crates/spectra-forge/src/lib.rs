//! Construct one-dimensional Schrödinger potentials with a prescribed
//! spectrum and verify the result with an independent finite-difference
//! eigensolver.
//!
//! The workhorse is the intertwining (Darboux) step: given the oscillator
//! V₀ = x²/2 and a nodeless solution of the associated Riccati equation at
//! energy ε < 1/2, the potential V₀ − α′ keeps the oscillator spectrum and
//! gains one level at ε. Iterating the step and composing it with a scaling
//! substitution yields four potential families with independently placed
//! levels. See the `transforms` module for the constructions, `riccati` for
//! the solution machinery, and `eigensolver` for the verification oracle.
//!
//! ```
//! use spectra_forge::{first_order_potential, predict_spectrum, FactorizationConfig};
//!
//! let f1 = FactorizationConfig::new(-1.0, 0.5)?;
//! let v = first_order_potential(f1)?;
//! assert!((v.value(0.0)? + 1.452890096193).abs() < 1e-9);
//!
//! let levels = predict_spectrum(v.spec(), 2);
//! assert_eq!(levels.values(), vec![-1.0, 0.5, 1.5]);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod cli;
pub mod eigensolver;
pub mod riccati;
pub mod specfun;
pub mod suite;
pub mod transforms;

pub use eigensolver::{
    discretize, lowest_eigenvalues, verify_spectrum, Grid, TridiagonalOperator, VerificationReport,
};
pub use riccati::{
    alpha_numeric, alpha_oscillator, nodeless_scan, riccati_residual, FactorizationConfig,
    NodelessCertificate, RiccatiSolution,
};
pub use suite::{run_all, CriterionResult};
pub use transforms::{
    build_potential, chain_alpha, first_order_potential, ground_state_fn, predict_spectrum,
    scaled_first_potential, scaled_second_potential, second_order_potential, GeneratedPotential,
    ScalingParam, SpectrumPrediction, TransformKind, TransformSpec,
};
