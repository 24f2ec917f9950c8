//! Independent finite-difference check on every spectrum claim.
//!
//! H = −(1/2)d²/dx² + V on a uniform grid with Dirichlet ends becomes a
//! symmetric tridiagonal matrix; its lowest eigenvalues come from
//! Sturm-sequence counting plus bisection. Nothing here reuses the analytic
//! machinery that produced the potential, which is the point.

use thiserror::Error;

use crate::transforms::{GeneratedPotential, SpectrumPrediction, TransformError};

#[derive(Debug, Clone, Error)]
pub enum EigenError {
    #[error("invalid_grid: {0}")]
    InvalidGrid(String),
    #[error("k_out_of_range: k={k} not in 1..={dim}")]
    KOutOfRange { k: usize, dim: usize },
    #[error("grid_too_narrow: edge potential {have:.3} below required {need:.3}")]
    GridTooNarrow { have: f64, need: f64 },
    #[error("non_finite_potential at x≈{x:.3}")]
    NonFinite { x: f64 },
    #[error("empty_prediction: nothing to verify")]
    EmptyPrediction,
    #[error(transparent)]
    Transform(#[from] TransformError),
}

/// Uniform evaluation grid, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self, EigenError> {
        if !x_min.is_finite() || !x_max.is_finite() || x_max <= x_min {
            return Err(EigenError::InvalidGrid(format!(
                "bad span [{x_min}, {x_max}]"
            )));
        }
        if n_points < 3 {
            return Err(EigenError::InvalidGrid(format!(
                "need at least 3 points (got {n_points})"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n: n_points,
        })
    }

    /// [−half_width, half_width] with n_points samples.
    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self, EigenError> {
        Self::new(-half_width, half_width, n_points)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        self.x_min + i as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.point(i))
    }

    /// Same span at half the spacing.
    pub fn doubled(&self) -> Self {
        Self {
            x_min: self.x_min,
            x_max: self.x_max,
            n: 2 * self.n - 1,
        }
    }
}

/// Discretized Hamiltonian restricted to interior points (Dirichlet ends):
/// diagonal 1/h² + V(xᵢ), constant off-diagonal −1/(2h²).
#[derive(Debug, Clone)]
pub struct TridiagonalOperator {
    diagonal: Vec<f64>,
    off_diagonal: f64,
}

impl TridiagonalOperator {
    pub fn new(diagonal: Vec<f64>, off_diagonal: f64) -> Result<Self, EigenError> {
        if diagonal.is_empty() {
            return Err(EigenError::InvalidGrid("empty operator".into()));
        }
        if diagonal.iter().any(|d| !d.is_finite()) || !off_diagonal.is_finite() {
            return Err(EigenError::InvalidGrid("non-finite matrix entry".into()));
        }
        Ok(Self {
            diagonal,
            off_diagonal,
        })
    }

    pub fn dimension(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> f64 {
        self.off_diagonal
    }

    /// Number of eigenvalues strictly below `mu`, by the classic LDLᵀ pivot
    /// sign count. Monotone non-decreasing in `mu`.
    pub fn sturm_count(&self, mu: f64) -> usize {
        const PIVMIN: f64 = 1e-300;
        let e2 = self.off_diagonal * self.off_diagonal;
        let mut count = 0;
        // recurrence q_i = (d_i − μ) − e²/q_{i−1}
        let mut prev = f64::NAN;
        for (i, &d) in self.diagonal.iter().enumerate() {
            let mut qi = if i == 0 { d - mu } else { d - mu - e2 / prev };
            if qi.abs() < PIVMIN {
                qi = -PIVMIN;
            }
            if qi < 0.0 {
                count += 1;
            }
            prev = qi;
        }
        count
    }

    /// y = T x.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.diagonal.len();
        assert_eq!(x.len(), n);
        let e = self.off_diagonal;
        (0..n)
            .map(|i| {
                let mut y = self.diagonal[i] * x[i];
                if i > 0 {
                    y += e * x[i - 1];
                }
                if i + 1 < n {
                    y += e * x[i + 1];
                }
                y
            })
            .collect()
    }

    fn gershgorin(&self) -> (f64, f64) {
        let w = 2.0 * self.off_diagonal.abs();
        let lo = self.diagonal.iter().cloned().fold(f64::INFINITY, f64::min) - w;
        let hi = self
            .diagonal
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
            + w;
        (lo, hi)
    }
}

/// Potential samples for [`discretize`]: plain closures and generated
/// potentials both qualify.
pub trait PotentialFn {
    fn at(&self, x: f64) -> Result<f64, EigenError>;
}

impl<F: Fn(f64) -> f64> PotentialFn for F {
    fn at(&self, x: f64) -> Result<f64, EigenError> {
        let v = self(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EigenError::NonFinite { x })
        }
    }
}

/// Three-point FD matrix of −(1/2)d²/dx² + V over the interior of `grid`.
pub fn discretize<P: PotentialFn + ?Sized>(
    potential: &P,
    grid: &Grid,
) -> Result<TridiagonalOperator, EigenError> {
    let h = grid.spacing();
    let inv_h2 = 1.0 / (h * h);
    let mut diagonal = Vec::with_capacity(grid.n_points() - 2);
    for i in 1..grid.n_points() - 1 {
        let x = grid.point(i);
        diagonal.push(inv_h2 + potential.at(x)?);
    }
    TridiagonalOperator::new(diagonal, -0.5 * inv_h2)
}

/// k-th smallest eigenvalue (0-indexed) by bisection on the Sturm count.
fn bisect_eigenvalue(op: &TridiagonalOperator, j: usize, mut lo: f64, mut hi: f64) -> f64 {
    // narrow until the interval stops being representable or hits the floor
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if op.sturm_count(mid) > j {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-13 * mid.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// The k smallest eigenvalues, ascending, each bisected well below the 1e−10
/// contract (physical accuracy is limited by h², not by this).
pub fn lowest_eigenvalues(op: &TridiagonalOperator, k: usize) -> Result<Vec<f64>, EigenError> {
    let dim = op.dimension();
    if k < 1 || k > dim {
        return Err(EigenError::KOutOfRange { k, dim });
    }
    let (lo, hi) = op.gershgorin();
    Ok((0..k).map(|j| bisect_eigenvalue(op, j, lo, hi)).collect())
}

/// Outcome of checking a predicted spectrum against the FD oracle.
///
/// `computed` holds the doubled-grid eigenvalues (the more accurate pair
/// member); `discretization_estimate` is the largest per-level Richardson
/// estimate |E_N − E_2N|/3. `pass` compares each error against `tolerance`,
/// tightened to a third of the local gap wherever two predicted levels sit
/// closer than 2·tolerance, so a level cannot pass by matching its
/// neighbor's eigenvalue.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub predicted: Vec<f64>,
    pub computed: Vec<f64>,
    pub abs_errors: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub discretization_estimate: f64,
}

/// Compare `predicted` with the FD eigenvalues of `potential` on `grid` and
/// its doubled refinement. The grid must be wide enough that the potential at
/// both edges exceeds the top predicted level by 5; if adjacent levels force
/// a tightened tolerance that the initial grid misses, the base grid is
/// refined to at least 4001 points once before judging.
pub fn verify_spectrum(
    predicted: &SpectrumPrediction,
    potential: &GeneratedPotential,
    grid: &Grid,
    tol: f64,
) -> Result<VerificationReport, EigenError> {
    let values = predicted.values();
    if values.is_empty() {
        return Err(EigenError::EmptyPrediction);
    }
    let top = values[values.len() - 1];
    let need = top + 5.0;
    let have = potential
        .value(grid.x_min())
        .map_err(EigenError::from)?
        .min(potential.value(grid.x_max()).map_err(EigenError::from)?);
    if have < need {
        return Err(EigenError::GridTooNarrow { have, need });
    }
    let k = values.len();
    let compute_pair = |g: &Grid| -> Result<(Vec<f64>, Vec<f64>), EigenError> {
        let coarse = lowest_eigenvalues(&discretize(potential, g)?, k)?;
        let fine = lowest_eigenvalues(&discretize(potential, &g.doubled())?, k)?;
        Ok((coarse, fine))
    };
    let mut eff = vec![tol; k];
    for i in 0..k.saturating_sub(1) {
        let gap = values[i + 1] - values[i];
        if gap < 2.0 * tol {
            eff[i] = eff[i].min(gap / 3.0);
            eff[i + 1] = eff[i + 1].min(gap / 3.0);
        }
    }
    let errors_of = |fine: &[f64]| -> Vec<f64> {
        values
            .iter()
            .zip(fine)
            .map(|(p, c)| (p - c).abs())
            .collect()
    };
    let (mut coarse, mut fine) = compute_pair(grid)?;
    let mut abs_errors = errors_of(&fine);
    let tightened = eff.iter().any(|&t| t < tol);
    let missed = abs_errors.iter().zip(&eff).any(|(e, t)| e > t);
    if tightened && missed && grid.n_points() < 4001 {
        let refined = Grid::new(grid.x_min(), grid.x_max(), 4001)?;
        let pair = compute_pair(&refined)?;
        coarse = pair.0;
        fine = pair.1;
        abs_errors = errors_of(&fine);
    }
    let discretization_estimate = coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).abs() / 3.0)
        .fold(0.0_f64, f64::max);
    let pass = abs_errors.iter().zip(&eff).all(|(e, t)| e <= t);
    Ok(VerificationReport {
        predicted: values,
        computed: fine,
        abs_errors,
        tolerance: tol,
        pass,
        discretization_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation_and_refinement() {
        assert!(Grid::new(1.0, 1.0, 11).is_err());
        assert!(Grid::new(0.0, 1.0, 2).is_err());
        assert!(Grid::new(f64::NAN, 1.0, 11).is_err());
        let g = Grid::new(-10.0, 10.0, 2001).unwrap();
        assert!((g.spacing() - 0.01).abs() < 1e-15);
        assert_eq!(g.point(1000), 0.0);
        let d = g.doubled();
        assert_eq!(d.n_points(), 4001);
        assert!((d.spacing() - 0.005).abs() < 1e-15);
        assert_eq!(d.x_max(), 10.0);
    }

    #[test]
    fn discretize_constant_potential() {
        // h = 0.5, V ≡ 0: diagonal 4, off-diagonal −2
        let g = Grid::new(-1.0, 1.0, 5).unwrap();
        let op = discretize(&|_x: f64| 0.0, &g).unwrap();
        assert_eq!(op.dimension(), 3);
        assert!(op.diagonal().iter().all(|&d| (d - 4.0).abs() < 1e-12));
        assert!((op.off_diagonal() + 2.0).abs() < 1e-12);
    }

    #[test]
    fn discretize_rejects_singular_sample() {
        let g = Grid::new(-1.0, 1.0, 5).unwrap();
        let res = discretize(&|x: f64| 1.0 / x, &g);
        assert!(matches!(res, Err(EigenError::NonFinite { .. })));
    }

    #[test]
    fn closed_form_three_by_three() {
        let op = TridiagonalOperator::new(vec![2.0, 2.0, 2.0], -1.0).unwrap();
        let eigs = lowest_eigenvalues(&op, 3).unwrap();
        let want = [
            2.0 - std::f64::consts::SQRT_2,
            2.0,
            2.0 + std::f64::consts::SQRT_2,
        ];
        for (got, want) in eigs.iter().zip(want) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
        assert!(matches!(
            lowest_eigenvalues(&op, 4),
            Err(EigenError::KOutOfRange { k: 4, dim: 3 })
        ));
        assert!(lowest_eigenvalues(&op, 0).is_err());
    }

    #[test]
    fn free_particle_matches_closed_form() {
        // V ≡ 0 on [0, L]: interior dim m, λ_k = (1 − cos(kπ/(m+1)))/h²
        let g = Grid::new(0.0, 5.0, 11).unwrap();
        let op = discretize(&|_x: f64| 0.0, &g).unwrap();
        let m = op.dimension();
        let h = g.spacing();
        let eigs = lowest_eigenvalues(&op, m).unwrap();
        for (k, got) in eigs.iter().enumerate() {
            let want =
                (1.0 - ((k + 1) as f64 * std::f64::consts::PI / (m + 1) as f64).cos()) / (h * h);
            assert!((got - want).abs() < 1e-10, "mode {k}: {got} vs {want}");
        }
    }

    #[test]
    fn oscillator_spectrum() {
        let g = Grid::new(-10.0, 10.0, 2001).unwrap();
        let op = discretize(&|x: f64| 0.5 * x * x, &g).unwrap();
        let eigs = lowest_eigenvalues(&op, 4).unwrap();
        assert!((eigs[0] - 0.5).abs() < 1e-3, "ground {}", eigs[0]);
        for (n, e) in eigs.iter().enumerate() {
            assert!((e - (n as f64 + 0.5)).abs() < 2e-3, "level {n}: {e}");
        }
    }

    #[test]
    fn sturm_count_monotone() {
        let g = Grid::new(-10.0, 10.0, 801).unwrap();
        let op = discretize(&|x: f64| 0.5 * x * x, &g).unwrap();
        let mut prev = 0;
        for i in 0..60 {
            let mu = -1.0 + 0.2 * i as f64;
            let c = op.sturm_count(mu);
            assert!(c >= prev, "count dropped at mu={mu}");
            prev = c;
        }
        assert_eq!(op.sturm_count(0.0), 0);
        assert_eq!(op.sturm_count(1.0), 1);
        assert_eq!(op.sturm_count(4.0), 4);
    }

    #[test]
    fn shift_equivariance() {
        // coarse grid keeps diagonal magnitudes small enough for 1e−12
        let g = Grid::new(-10.0, 10.0, 201).unwrap();
        let c = 3.7;
        let base = discretize(&|x: f64| 0.5 * x * x, &g).unwrap();
        let shifted = discretize(&|x: f64| 0.5 * x * x + c, &g).unwrap();
        assert!((base.off_diagonal() - shifted.off_diagonal()).abs() == 0.0);
        let e0 = lowest_eigenvalues(&base, 3).unwrap();
        let e1 = lowest_eigenvalues(&shifted, 3).unwrap();
        for (a, b) in e0.iter().zip(&e1) {
            assert!((b - a - c).abs() < 1e-12, "shift broke: {a} -> {b}");
        }
    }

    #[test]
    fn grid_halving_quarters_the_error() {
        let err_at = |n: usize| {
            let g = Grid::new(-10.0, 10.0, n).unwrap();
            let op = discretize(&|x: f64| 0.5 * x * x, &g).unwrap();
            (lowest_eigenvalues(&op, 1).unwrap()[0] - 0.5).abs()
        };
        let coarse = err_at(251);
        let fine = err_at(501);
        let ratio = coarse / fine;
        assert!((2.5..6.0).contains(&ratio), "convergence ratio {ratio}");
    }

    #[test]
    fn apply_matches_matrix_action() {
        let op = TridiagonalOperator::new(vec![1.0, 2.0, 3.0], 0.5).unwrap();
        let y = op.apply(&[1.0, 1.0, 1.0]);
        assert_eq!(y, vec![1.5, 3.0, 3.5]);
    }

    mod verification {
        use super::super::*;
        use crate::riccati::FactorizationConfig;
        use crate::transforms::{first_order_potential, predict_spectrum};

        fn shifted_oscillator() -> GeneratedPotential {
            first_order_potential(FactorizationConfig::new(-0.5, 0.0).unwrap()).unwrap()
        }

        #[test]
        fn shifted_oscillator_passes() {
            let v = shifted_oscillator();
            let predicted = predict_spectrum(v.spec(), 2);
            let grid = Grid::new(-10.0, 10.0, 2001).unwrap();
            let report = verify_spectrum(&predicted, &v, &grid, 1e-3).unwrap();
            assert!(report.pass, "errors: {:?}", report.abs_errors);
            assert_eq!(report.predicted, vec![-0.5, 0.5, 1.5]);
            assert_eq!(report.computed.len(), 3);
            assert!(report.discretization_estimate > 0.0);
            assert!(report.discretization_estimate < 1e-3);
        }

        #[test]
        fn impossible_tolerance_fails_with_errors_reported() {
            let v = shifted_oscillator();
            let predicted = predict_spectrum(v.spec(), 2);
            let grid = Grid::new(-10.0, 10.0, 2001).unwrap();
            let report = verify_spectrum(&predicted, &v, &grid, 0.0).unwrap();
            assert!(!report.pass);
            assert_eq!(report.abs_errors.len(), 3);
            assert!(report.abs_errors.iter().all(|&e| e > 0.0));
        }

        #[test]
        fn narrow_grid_is_rejected() {
            let v = shifted_oscillator();
            let predicted = predict_spectrum(v.spec(), 2);
            let grid = Grid::new(-3.0, 3.0, 601).unwrap();
            assert!(matches!(
                verify_spectrum(&predicted, &v, &grid, 1e-3),
                Err(EigenError::GridTooNarrow { .. })
            ));
        }
    }
}
