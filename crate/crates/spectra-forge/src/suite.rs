//! Self-checks behind the `verify` subcommand. Each criterion rebuilds its
//! configuration from scratch, judges itself against the documented
//! tolerance, and reports one pass/fail line. Any construction error fails
//! the criterion with the error text as detail; nothing is swallowed.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::eigensolver::{discretize, lowest_eigenvalues, verify_spectrum, Grid};
use crate::riccati::{
    alpha_numeric, alpha_oscillator, riccati_residual, FactorizationConfig, OscillatorAlpha,
    RiccatiSolution,
};
use crate::transforms::{
    first_order_potential, intertwining_residual, predict_spectrum, scaled_first_potential,
    scaled_second_potential, second_order_potential, GaussianTest, GeneratedPotential, Kernel,
    ScalingParam, TransformSpec,
};

/// Outcome of one verification criterion.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Run every criterion in order. All of them must pass for `verify` to
/// exit 0.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
    ]
}

fn outcome(id: usize, name: &'static str, r: Result<(bool, String), String>) -> CriterionResult {
    match r {
        Ok((passed, detail)) => CriterionResult {
            id,
            name,
            passed,
            detail,
        },
        Err(e) => CriterionResult {
            id,
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn cfg(eps: f64, nu: f64) -> Result<FactorizationConfig, String> {
    FactorizationConfig::new(eps, nu).map_err(|e| e.to_string())
}

fn base_grid() -> Result<Grid, String> {
    Grid::symmetric(10.0, 2001).map_err(|e| e.to_string())
}

/// Default spectrum tolerance; stretched potentials (energy scale ≥ 3/2)
/// carry roughly twice the discretization error at a fixed grid.
pub fn default_tolerance(spec: &TransformSpec) -> f64 {
    if spec.energy_scale() >= 1.5 {
        4e-3
    } else {
        2e-3
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + i as f64 * h).collect()
}

/// Taylor-series erf; plenty for |x| ≤ 6 at the tolerances used here (the
/// α(x) comparison is insensitive to erf at large |x| because of e^{−x²}).
fn erf(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let mut k = 0usize;
    while term.abs() > 1e-18 * sum.abs().max(1.0) && k < 400 {
        k += 1;
        term *= -x * x / k as f64;
        sum += term / (2 * k + 1) as f64;
    }
    sum * 2.0 / PI.sqrt()
}

/// Free oscillator through the FD pipeline: lowest five eigenvalues of
/// x²/2 on [−10, 10] with 2001 points, each within 2e−3 of n + 1/2.
pub fn criterion_1() -> CriterionResult {
    outcome(
        1,
        "oscillator_baseline",
        (|| {
            let grid = base_grid()?;
            let op = discretize(&|x: f64| 0.5 * x * x, &grid).map_err(|e| e.to_string())?;
            let evs = lowest_eigenvalues(&op, 5).map_err(|e| e.to_string())?;
            let max_err = evs
                .iter()
                .enumerate()
                .map(|(n, e)| (e - (n as f64 + 0.5)).abs())
                .fold(0.0, f64::max);
            Ok((
                max_err <= 2e-3,
                format!("max_abs_err={max_err:.3e} tol=2.0e-3"),
            ))
        })(),
    )
}

/// One-step insertion at ε₁ = −1 with ν₁ = 1/2: spectrum {−1} ∪ ladder
/// within 2e−3, and the ν = 0 member of the same family is exactly the
/// oscillator shifted down by 1.
pub fn criterion_2() -> CriterionResult {
    outcome(
        2,
        "first_order_shifted_ladder",
        (|| {
            let grid = base_grid()?;
            let v = first_order_potential(cfg(-1.0, 0.5)?).map_err(|e| e.to_string())?;
            let pred = predict_spectrum(v.spec(), 4);
            let rep = verify_spectrum(&pred, &v, &grid, 2e-3).map_err(|e| e.to_string())?;
            let max_err = rep.abs_errors.iter().cloned().fold(0.0, f64::max);

            let w = first_order_potential(cfg(-0.5, 0.0)?).map_err(|e| e.to_string())?;
            let mut shift_dev = 0.0_f64;
            for x in linspace(-6.0, 6.0, 201) {
                let got = w.value(x).map_err(|e| e.to_string())?;
                shift_dev = shift_dev.max((got - (0.5 * x * x - 1.0)).abs());
            }
            Ok((
                rep.pass && shift_dev <= 1e-10,
                format!("max_abs_err={max_err:.3e} tol=2.0e-3 shift_dev={shift_dev:.3e}"),
            ))
        })(),
    )
}

/// At ε = −1/2 the carrier collapses to an error-function expression:
/// α(x) = x + (2ν/√π)·e^{−x²}/(1 + ν·erf x). Both branches must agree to
/// 1e−8 across [−5, 5] for ν = 0.3 and ν = −0.7.
pub fn criterion_3() -> CriterionResult {
    outcome(
        3,
        "error_function_branch",
        (|| {
            let mut worst = 0.0_f64;
            for nu in [0.3, -0.7] {
                let c = cfg(-0.5, nu)?;
                for x in linspace(-5.0, 5.0, 201) {
                    let (a, _) = alpha_oscillator(x, &c).map_err(|e| e.to_string())?;
                    let closed = x + (2.0 * nu / PI.sqrt()) * (-x * x).exp() / (1.0 + nu * erf(x));
                    worst = worst.max((a - closed).abs());
                }
            }
            Ok((worst <= 1e-8, format!("max_abs_dev={worst:.3e} tol=1.0e-8")))
        })(),
    )
}

/// Two-step family ε₂ = −1/2, ν₂ = 10⁴: for ε₁ ∈ {−0.4, 0, 0.4} the FD
/// spectrum on a 4001-point grid matches {−1/2, ε₁} ∪ ladder, and only the
/// ε₁ level moves between runs.
pub fn criterion_4() -> CriterionResult {
    outcome(
        4,
        "second_order_placement",
        (|| {
            let grid = Grid::symmetric(10.0, 4001).map_err(|e| e.to_string())?;
            let f2 = cfg(-0.5, 10000.0)?;
            let mut computed_runs: Vec<Vec<f64>> = Vec::new();
            let mut max_err = 0.0_f64;
            let mut all_pass = true;
            for eps1 in [0.4, 0.0, -0.4] {
                let v = second_order_potential(cfg(eps1, 0.0)?, f2).map_err(|e| e.to_string())?;
                let pred = predict_spectrum(v.spec(), 3);
                let rep = verify_spectrum(&pred, &v, &grid, 2e-3).map_err(|e| e.to_string())?;
                all_pass &= rep.pass;
                max_err = max_err.max(rep.abs_errors.iter().cloned().fold(0.0, f64::max));
                computed_runs.push(rep.computed);
            }
            // Prediction order is (ε₂, ε₁, ladder...) for every run here, so the
            // movable level sits at index 1 in each computed list.
            let mut fixed_drift = 0.0_f64;
            for a in 0..computed_runs.len() {
                for b in a + 1..computed_runs.len() {
                    for i in [0usize, 2, 3, 4] {
                        fixed_drift =
                            fixed_drift.max((computed_runs[a][i] - computed_runs[b][i]).abs());
                    }
                }
            }
            let moved = (computed_runs[0][1] - computed_runs[2][1]).abs();
            let pass = all_pass && fixed_drift <= 1e-3 && moved >= 0.7;
            Ok((
            pass,
            format!(
                "max_abs_err={max_err:.3e} tol=2.0e-3 fixed_drift={fixed_drift:.3e} second_level_span={moved:.3}"
            ),
        ))
        })(),
    )
}

/// Scaled one-step family with ε₁ = −q²/2, ν = 0 for q ∈ {1/√2, 1, √2}:
/// spectrum {−1/2} ∪ q⁻²(n + 1/2) at the scale-dependent tolerance, ground
/// level −1/2 in all three runs, and a genuine double well at q = 1/√2.
pub fn criterion_5() -> CriterionResult {
    outcome(
        5,
        "scaled_first_family",
        (|| {
            let grid = base_grid()?;
            let mut detail = String::new();
            let mut pass = true;
            for q in [FRAC_1_SQRT_2, 1.0, SQRT_2] {
                let eps1 = -q * q / 2.0;
                let v = scaled_first_potential(
                    cfg(eps1, 0.0)?,
                    ScalingParam::new(q).map_err(|e| e.to_string())?,
                )
                .map_err(|e| e.to_string())?;
                let pred = predict_spectrum(v.spec(), 4);
                let tol = default_tolerance(v.spec());
                if (pred.values()[0] + 0.5).abs() > 1e-12 {
                    return Ok((false, format!("ground prediction off at q={q}")));
                }
                let rep = verify_spectrum(&pred, &v, &grid, tol).map_err(|e| e.to_string())?;
                let max_err = rep.abs_errors.iter().cloned().fold(0.0, f64::max);
                pass &= rep.pass;
                detail.push_str(&format!(
                    "q={q:.4}: max_abs_err={max_err:.3e} tol={tol:.1e}; "
                ));
                if (q - FRAC_1_SQRT_2).abs() < 1e-12 {
                    let minima = count_local_minima(&v, -5.0, 5.0, 1001)?;
                    pass &= minima == 2;
                    detail.push_str(&format!("minima={minima}; "));
                }
            }
            Ok((pass, detail.trim_end_matches("; ").to_string()))
        })(),
    )
}

fn count_local_minima(v: &GeneratedPotential, lo: f64, hi: f64, n: usize) -> Result<usize, String> {
    let xs = linspace(lo, hi, n);
    let mut vals = Vec::with_capacity(n);
    for &x in &xs {
        vals.push(v.value(x).map_err(|e| e.to_string())?);
    }
    Ok((1..n - 1)
        .filter(|&i| vals[i] < vals[i - 1] && vals[i] < vals[i + 1])
        .count())
}

/// Scaled two-step run (q₁ = √2, ν₂ = 1.1, ε₁ = −1, ε₂ = −3/2): spectrum
/// {−3/4, −1/2, 1/4, 3/4, 5/4} within 2e−3; with q₁ = 1 and the lock
/// ε₁ = −q₁²/2 the spectrum is {−3/2, −1/2, 1/2, 3/2, 5/2} and the second
/// level stays at −1/2 across both runs.
pub fn criterion_6() -> CriterionResult {
    outcome(
        6,
        "scaled_second_family",
        (|| {
            let grid = base_grid()?;
            let one = ScalingParam::identity();
            let run = |q1: f64| -> Result<Vec<f64>, String> {
                let eps1 = -q1 * q1 / 2.0;
                let v = scaled_second_potential(
                    cfg(eps1, 0.0)?,
                    ScalingParam::new(q1).map_err(|e| e.to_string())?,
                    cfg(-1.5, 1.1)?,
                    one,
                )
                .map_err(|e| e.to_string())?;
                let pred = predict_spectrum(v.spec(), 3);
                let rep = verify_spectrum(&pred, &v, &grid, default_tolerance(v.spec()))
                    .map_err(|e| e.to_string())?;
                if !rep.pass {
                    return Err(format!(
                        "q1={q1}: max_abs_err={:.3e} exceeds tolerance",
                        rep.abs_errors.iter().cloned().fold(0.0, f64::max)
                    ));
                }
                Ok(rep.computed)
            };
            let a = run(SQRT_2)?;
            let b = run(1.0)?;
            let second_drift = (a[1] - b[1]).abs();
            let pass =
                second_drift <= 2e-3 && (a[1] + 0.5).abs() <= 2e-3 && (b[1] + 0.5).abs() <= 2e-3;
            Ok((
                pass,
                format!("both runs pass; second_level_drift={second_drift:.3e} tol=2.0e-3"),
            ))
        })(),
    )
}

/// Locked scaled two-step at q₁ = 1.2 (ε₁ = q₁²/4, ε₂ = −q₁²/2, ν₂ = 10⁴):
/// lowest levels {−0.5, 0.25, 0.34722, 1.04167} within 2e−3, and the two
/// lowest agree with the q₁ = 1 member of the same locked family.
pub fn criterion_7() -> CriterionResult {
    outcome(
        7,
        "scaled_second_locked",
        (|| {
            let grid = base_grid()?;
            let one = ScalingParam::identity();
            let run = |q1: f64| -> Result<Vec<f64>, String> {
                let v = scaled_second_potential(
                    cfg(q1 * q1 / 4.0, 0.0)?,
                    ScalingParam::new(q1).map_err(|e| e.to_string())?,
                    cfg(-q1 * q1 / 2.0, 10000.0)?,
                    one,
                )
                .map_err(|e| e.to_string())?;
                let pred = predict_spectrum(v.spec(), 3);
                let rep = verify_spectrum(&pred, &v, &grid, 2e-3).map_err(|e| e.to_string())?;
                if !rep.pass {
                    return Err(format!(
                        "q1={q1}: max_abs_err={:.3e} exceeds tolerance",
                        rep.abs_errors.iter().cloned().fold(0.0, f64::max)
                    ));
                }
                Ok(rep.computed)
            };
            let a = run(1.2)?;
            let b = run(1.0)?;
            let stated = [-0.5, 0.25, 0.34722, 1.04167];
            let named_err = stated
                .iter()
                .zip(&a)
                .map(|(s, c)| (s - c).abs())
                .fold(0.0, f64::max);
            let low_drift = (a[0] - b[0]).abs().max((a[1] - b[1]).abs());
            let pass = named_err <= 2e-3 && low_drift <= 2e-3;
            Ok((
                pass,
                format!(
                    "named_levels_err={named_err:.3e} low_pair_drift={low_drift:.3e} tol=2.0e-3"
                ),
            ))
        })(),
    )
}

/// Property sweep: Riccati residuals on random admissible configs, the
/// change-of-variables identity, q = 1 reductions, order-swap symmetry,
/// operator intertwining on Gaussian probes, evenness at ν = 0, and
/// agreement between the closed-form and integrated backends.
pub fn criterion_8() -> CriterionResult {
    outcome(
        8,
        "property_suites",
        (|| {
            let mut detail = String::new();
            let mut pass = true;

            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let mut worst = 0.0_f64;
            for _ in 0..20 {
                let eps = rng.gen_range(-3.0..0.45);
                let nu = rng.gen_range(-0.95..0.95);
                let sol = RiccatiSolution::analytic_oscillator(cfg(eps, nu)?)
                    .map_err(|e| e.to_string())?;
                for x in linspace(-6.0, 6.0, 81) {
                    worst = worst.max(riccati_residual(&sol, x).map_err(|e| e.to_string())?.abs());
                }
            }
            pass &= worst <= 1e-8;
            detail.push_str(&format!("riccati_residual={worst:.3e}/1e-8; "));

            let c = cfg(-1.0, 0.4)?;
            let mut worst = 0.0_f64;
            for q in [FRAC_1_SQRT_2, SQRT_2] {
                for x in linspace(-5.0, 5.0, 101) {
                    let y = x / q;
                    let (a, ap) = alpha_oscillator(y, &c).map_err(|e| e.to_string())?;
                    let a1 = a / q;
                    let a1p = ap / (q * q);
                    let res = a1p + a1 * a1 - (x * x / q.powi(4) - 2.0 * c.eps() / (q * q));
                    worst = worst.max(res.abs());
                }
            }
            pass &= worst <= 1e-8;
            detail.push_str(&format!("rescaled_residual={worst:.3e}/1e-8; "));

            let mut worst = 0.0_f64;
            let plain1 = first_order_potential(c).map_err(|e| e.to_string())?;
            let unit1 =
                scaled_first_potential(c, ScalingParam::identity()).map_err(|e| e.to_string())?;
            let f2 = cfg(-1.5, 1.1)?;
            let plain2 = second_order_potential(c, f2).map_err(|e| e.to_string())?;
            let unit2 =
                scaled_second_potential(c, ScalingParam::identity(), f2, ScalingParam::identity())
                    .map_err(|e| e.to_string())?;
            for x in linspace(-8.0, 8.0, 161) {
                let d1 = (plain1.value(x).map_err(|e| e.to_string())?
                    - unit1.value(x).map_err(|e| e.to_string())?)
                .abs();
                let d2 = (plain2.value(x).map_err(|e| e.to_string())?
                    - unit2.value(x).map_err(|e| e.to_string())?)
                .abs();
                worst = worst.max(d1).max(d2);
            }
            pass &= worst <= 1e-12;
            detail.push_str(&format!("unit_scale_reduction={worst:.3e}/1e-12; "));

            let fa = cfg(0.4, 0.0)?;
            let fb = cfg(-0.5, 10000.0)?;
            let fwd = Kernel::TwoStep {
                sol1: OscillatorAlpha::new(fa).map_err(|e| e.to_string())?,
                sol2: OscillatorAlpha::new(fb).map_err(|e| e.to_string())?,
                delta: fa.eps() - fb.eps(),
                s: 1.0,
            };
            let rev = Kernel::TwoStep {
                sol1: OscillatorAlpha::new(fb).map_err(|e| e.to_string())?,
                sol2: OscillatorAlpha::new(fa).map_err(|e| e.to_string())?,
                delta: fb.eps() - fa.eps(),
                s: 1.0,
            };
            let mut worst = 0.0_f64;
            for x in linspace(-8.0, 8.0, 161) {
                let a = fwd.value(x).map_err(|e| e.to_string())?;
                let b = rev.value(x).map_err(|e| e.to_string())?;
                worst = worst.max((a - b).abs());
            }
            pass &= worst <= 1e-12;
            detail.push_str(&format!("swap_symmetry={worst:.3e}/1e-12; "));

            let probes = linspace(-4.0, 4.0, 50);
            let gauss = GaussianTest::default();
            let specs = [
                TransformSpec::first_order(cfg(-1.0, 0.5)?),
                TransformSpec::scaled_first(
                    cfg(-1.0, 0.0)?,
                    ScalingParam::new(SQRT_2).map_err(|e| e.to_string())?,
                ),
                TransformSpec::second_order(cfg(0.4, 0.0)?, fb).map_err(|e| e.to_string())?,
                TransformSpec::scaled_second(
                    cfg(-1.0, 0.0)?,
                    ScalingParam::new(SQRT_2).map_err(|e| e.to_string())?,
                    cfg(-1.5, 1.1)?,
                    ScalingParam::identity(),
                )
                .map_err(|e| e.to_string())?,
            ];
            let mut worst = 0.0_f64;
            for spec in &specs {
                worst = worst
                    .max(intertwining_residual(spec, &gauss, &probes).map_err(|e| e.to_string())?);
            }
            pass &= worst <= 1e-8;
            detail.push_str(&format!("intertwining={worst:.3e}/1e-8; "));

            let even_a = first_order_potential(cfg(-1.7, 0.0)?).map_err(|e| e.to_string())?;
            let even_b = scaled_first_potential(
                cfg(-1.0, 0.0)?,
                ScalingParam::new(SQRT_2).map_err(|e| e.to_string())?,
            )
            .map_err(|e| e.to_string())?;
            let mut worst = 0.0_f64;
            for x in linspace(0.05, 6.0, 120) {
                for v in [&even_a, &even_b] {
                    let d = (v.value(x).map_err(|e| e.to_string())?
                        - v.value(-x).map_err(|e| e.to_string())?)
                    .abs();
                    worst = worst.max(d);
                }
            }
            pass &= worst <= 1e-10;
            detail.push_str(&format!("evenness={worst:.3e}/1e-10; "));

            let ana = OscillatorAlpha::new(c).map_err(|e| e.to_string())?;
            let num = alpha_numeric(
                |x: f64| 0.5 * x * x,
                c.eps(),
                ana.slope_at_origin(),
                &Grid::symmetric(5.0, 10001).map_err(|e| e.to_string())?,
            )
            .map_err(|e| e.to_string())?;
            let mut worst = 0.0_f64;
            for x in linspace(-4.5, 4.5, 101) {
                let (got, _) = num.eval(x).map_err(|e| e.to_string())?;
                let (want, _) = alpha_oscillator(x, &c).map_err(|e| e.to_string())?;
                worst = worst.max((got - want).abs());
            }
            pass &= worst <= 1e-6;
            detail.push_str(&format!("backend_agreement={worst:.3e}/1e-6"));

            Ok((pass, detail))
        })(),
    )
}
