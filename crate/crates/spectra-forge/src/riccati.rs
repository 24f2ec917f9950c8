//! Solutions α(x, ε) of the Riccati equation α′ + α² = 2(V₀(x) − ε) attached
//! to the factorization of a Schrödinger operator.
//!
//! For the oscillator V₀ = x²/2 the general solution is carried by
//!
//! u(x) = ₁F₁((1+2ε)/4, 1/2; −x²) + 2ν·r(ε)·x·₁F₁((3+2ε)/4, 3/2; −x²),
//!
//! with r(ε) = Γ((3−2ε)/4)/Γ((1−2ε)/4), through α = x + u′/u. The logarithmic
//! derivative is valid wherever u has no zero, so adding a level requires a
//! nodelessness certificate; [`nodeless_scan`] produces one. A numeric backend
//! integrates ψ″ = 2(V − ε)ψ directly for potentials with no closed form.

use std::sync::Arc;

use thiserror::Error;

use crate::eigensolver::Grid;
use crate::specfun::{self, SpecFunError};

/// |u| below this at an evaluation point is a singularity, provided a sign
/// change confirms an actual zero nearby; scans never flag small |u| alone.
pub const SINGULARITY_EPS: f64 = 1e-13;
/// Width to which a bracketed sign change is bisected.
const BISECT_WIDTH: f64 = 1e-10;
/// Two levels closer than this cannot be chained.
pub const DEGENERACY_EPS: f64 = 1e-9;
/// Integrator substep ceiling for the numeric backend.
const MAX_SUBSTEP: f64 = 1e-3;
/// Magnitude at which the numeric backend rescales (ψ, ψ′).
const RENORM_AT: f64 = 1e100;

#[derive(Debug, Clone, Error)]
pub enum RiccatiError {
    #[error("invalid_config: {0}")]
    InvalidConfig(String),
    #[error("singular_solution at x≈{x:.3}")]
    Singularity { x: f64 },
    #[error("sign_change at x≈{x:.3}: psi crosses zero")]
    SignChange { x: f64 },
    #[error("denominator_zero at x≈{x:.3}")]
    DenominatorZero { x: f64 },
    #[error("degenerate_energies: level spacing below {DEGENERACY_EPS:e}")]
    DegenerateEnergies,
    #[error("non_finite_potential at x≈{x:.3}")]
    NonFinite { x: f64 },
    #[error("outside_grid: x={x} not covered by the sampled grid")]
    OutsideGrid { x: f64 },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// One factorization level: the energy ε of the level to insert and the
/// mixing parameter ν selecting which nodeless solution carries it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorizationConfig {
    eps: f64,
    nu: f64,
}

impl FactorizationConfig {
    /// ε must lie strictly below the base ground state at 1/2.
    pub fn new(eps: f64, nu: f64) -> Result<Self, RiccatiError> {
        if !eps.is_finite() || eps >= 0.5 {
            return Err(RiccatiError::InvalidConfig(format!(
                "eps must be finite and < 1/2 (got {eps})"
            )));
        }
        if !nu.is_finite() {
            return Err(RiccatiError::InvalidConfig(format!(
                "nu must be finite (got {nu})"
            )));
        }
        Ok(Self { eps, nu })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

/// Analytic oscillator solution: u and its derivatives by term-wise
/// differentiation of the two hypergeometric branches, chain rule through
/// z = −x².
#[derive(Debug, Clone, Copy)]
pub struct OscillatorAlpha {
    cfg: FactorizationConfig,
    kappa: f64,
}

impl OscillatorAlpha {
    pub fn new(cfg: FactorizationConfig) -> Result<Self, RiccatiError> {
        let kappa = 2.0 * cfg.nu * specfun::gamma_ratio(cfg.eps)?;
        Ok(Self { cfg, kappa })
    }

    pub fn config(&self) -> FactorizationConfig {
        self.cfg
    }

    /// u′(0) = 2ν·Γ((3−2ε)/4)/Γ((1−2ε)/4); u(0) = 1.
    pub fn slope_at_origin(&self) -> f64 {
        self.kappa
    }

    /// u(x), u′(x), …, up to `order` (≤ 4). Entries past `order` are zero.
    pub(crate) fn u_jet(&self, x: f64, order: usize) -> Result<[f64; 5], RiccatiError> {
        debug_assert!(order <= 4);
        let a1 = (1.0 + 2.0 * self.cfg.eps) / 4.0;
        let a2 = (3.0 + 2.0 * self.cfg.eps) / 4.0;
        let z = -x * x;
        let mut m1 = [0.0_f64; 5];
        let mut m2 = [0.0_f64; 5];
        for k in 0..=order {
            m1[k] = specfun::kummer_1f1_dzk(a1, 0.5, z, k)?;
            m2[k] = specfun::kummer_1f1_dzk(a2, 1.5, z, k)?;
        }
        // x-derivatives of M(a, b; −x²) from its z-derivatives
        let chain = |m: &[f64; 5]| {
            let x2 = x * x;
            [
                m[0],
                -2.0 * x * m[1],
                -2.0 * m[1] + 4.0 * x2 * m[2],
                12.0 * x * m[2] - 8.0 * x2 * x * m[3],
                12.0 * m[2] - 48.0 * x2 * m[3] + 16.0 * x2 * x2 * m[4],
            ]
        };
        let f = chain(&m1);
        let g = chain(&m2);
        let mut u = [0.0_f64; 5];
        u[0] = f[0] + self.kappa * x * g[0];
        for k in 1..=order {
            // (x·g)^(k) = k·g^(k−1) + x·g^(k)
            u[k] = f[k] + self.kappa * (k as f64 * g[k - 1] + x * g[k]);
        }
        Ok(u)
    }

    pub fn u(&self, x: f64) -> Result<f64, RiccatiError> {
        Ok(self.u_jet(x, 0)?[0])
    }

    /// (α, α′) at x; errors if u is singular there.
    pub fn alpha(&self, x: f64) -> Result<(f64, f64), RiccatiError> {
        let j = self.alpha_jet(x, 1)?;
        Ok((j[0], j[1]))
    }

    /// α and derivatives up to `order` (≤ 3) at x.
    ///
    /// α = x + u′/u, so with r_k = u^(k)/u:
    /// α′ = 1 + r₂ − r₁², α″ = r₃ − 3r₁r₂ + 2r₁³,
    /// α‴ = r₄ − 4r₁r₃ − 3r₂² + 12r₁²r₂ − 6r₁⁴.
    pub fn alpha_jet(&self, x: f64, order: usize) -> Result<[f64; 4], RiccatiError> {
        debug_assert!(order <= 3);
        let u = self.u_jet(x, order + 1)?;
        if u[0].abs() < SINGULARITY_EPS {
            return Err(RiccatiError::Singularity { x });
        }
        let r1 = u[1] / u[0];
        let mut out = [0.0_f64; 4];
        out[0] = x + r1;
        if order >= 1 {
            let r2 = u[2] / u[0];
            out[1] = 1.0 + r2 - r1 * r1;
            if order >= 2 {
                let r3 = u[3] / u[0];
                out[2] = r3 - 3.0 * r1 * r2 + 2.0 * r1.powi(3);
                if order >= 3 {
                    let r4 = u[4] / u[0];
                    out[3] =
                        r4 - 4.0 * r1 * r3 - 3.0 * r2 * r2 + 12.0 * r1 * r1 * r2 - 6.0 * r1.powi(4);
                }
            }
        }
        Ok(out)
    }
}

/// (α, α′) of the analytic oscillator solution for `cfg` at x.
pub fn alpha_oscillator(x: f64, cfg: &FactorizationConfig) -> Result<(f64, f64), RiccatiError> {
    OscillatorAlpha::new(*cfg)?.alpha(x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanOutcome {
    Nodeless,
    ZeroFound { x: f64 },
}

/// Result of scanning a carrier function for zeros on an interval.
#[derive(Debug, Clone, Copy)]
pub struct NodelessCertificate {
    pub interval: (f64, f64),
    pub grid_points: usize,
    pub outcome: ScanOutcome,
}

impl NodelessCertificate {
    pub fn is_nodeless(&self) -> bool {
        matches!(self.outcome, ScanOutcome::Nodeless)
    }
}

fn bisect_zero<F>(f: &F, mut lo: f64, mut hi: f64, flo: f64) -> Result<f64, RiccatiError>
where
    F: Fn(f64) -> Result<f64, RiccatiError>,
{
    let slo = flo.signum();
    while hi - lo > BISECT_WIDTH {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Scan f for sign changes on [lo, hi] with n samples, refining around every
/// local minimum of |f| before concluding. A sign change is bisected to a
/// located zero; small magnitude alone never counts.
pub(crate) fn scan_sign_change<F>(
    f: &F,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<ScanOutcome, RiccatiError>
where
    F: Fn(f64) -> Result<f64, RiccatiError>,
{
    let h = (hi - lo) / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|i| lo + i as f64 * h).collect();
    let mut vals = Vec::with_capacity(n);
    for &x in &xs {
        vals.push(f(x)?);
    }
    for i in 0..n - 1 {
        if vals[i] == 0.0 {
            return Ok(ScanOutcome::ZeroFound { x: xs[i] });
        }
        if vals[i].signum() != vals[i + 1].signum() {
            let z = bisect_zero(f, xs[i], xs[i + 1], vals[i])?;
            return Ok(ScanOutcome::ZeroFound { x: z });
        }
    }
    // near-miss refinement: look between samples around dips of |f|
    for i in 1..n - 1 {
        if vals[i].abs() < vals[i - 1].abs() && vals[i].abs() < vals[i + 1].abs() {
            let probes = [xs[i] - 0.5 * h, xs[i] + 0.5 * h];
            let mut prev_x = xs[i - 1];
            let mut prev_v = vals[i - 1];
            for &p in probes.iter().chain(std::iter::once(&xs[i + 1])) {
                let v = f(p)?;
                if v == 0.0 {
                    return Ok(ScanOutcome::ZeroFound { x: p });
                }
                if v.signum() != prev_v.signum() {
                    let z = bisect_zero(f, prev_x, p, prev_v)?;
                    return Ok(ScanOutcome::ZeroFound { x: z });
                }
                prev_x = p;
                prev_v = v;
            }
        }
    }
    Ok(ScanOutcome::Nodeless)
}

/// Certify that the carrier u of `cfg` keeps one sign on [x_lo, x_hi].
///
/// n ≥ 101 samples, hotspots refined, any sign change bisected to 1e−10.
pub fn nodeless_scan(
    cfg: &FactorizationConfig,
    x_lo: f64,
    x_hi: f64,
    n: usize,
) -> Result<NodelessCertificate, RiccatiError> {
    if n < 101 {
        return Err(RiccatiError::InvalidConfig(format!(
            "nodeless scan needs at least 101 points (got {n})"
        )));
    }
    if !x_lo.is_finite() || !x_hi.is_finite() || x_lo >= x_hi {
        return Err(RiccatiError::InvalidConfig(format!(
            "bad scan interval [{x_lo}, {x_hi}]"
        )));
    }
    let sol = OscillatorAlpha::new(*cfg)?;
    let outcome = scan_sign_change(&|x| sol.u(x), x_lo, x_hi, n)?;
    Ok(NodelessCertificate {
        interval: (x_lo, x_hi),
        grid_points: n,
        outcome,
    })
}

/// α sampled on a grid by direct integration of ψ″ = 2(V − ε)ψ.
#[derive(Debug, Clone)]
struct NumericAlpha {
    x0: f64,
    h: f64,
    a: Vec<f64>,
    ap: Vec<f64>,
}

impl NumericAlpha {
    fn eval(&self, x: f64) -> Result<(f64, f64), RiccatiError> {
        let n = self.a.len();
        let hi = self.x0 + (n - 1) as f64 * self.h;
        if x < self.x0 - 1e-12 || x > hi + 1e-12 {
            return Err(RiccatiError::OutsideGrid { x });
        }
        let mut i = ((x - self.x0) / self.h).floor() as isize;
        i = i.clamp(0, n as isize - 2);
        let i = i as usize;
        let t = ((x - self.x0) - i as f64 * self.h) / self.h;
        let (a0, a1) = (self.a[i], self.a[i + 1]);
        let (m0, m1) = (self.ap[i] * self.h, self.ap[i + 1] * self.h);
        let t2 = t * t;
        let t3 = t2 * t;
        let val = (2.0 * t3 - 3.0 * t2 + 1.0) * a0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * a1
            + (t3 - t2) * m1;
        let dval = ((6.0 * t2 - 6.0 * t) * a0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * a1
            + (3.0 * t2 - 2.0 * t) * m1)
            / self.h;
        Ok((val, dval))
    }
}

/// One RK4 step of (ψ, ψ′) with ψ″ = f(x)ψ.
fn rk4_step<F: Fn(f64) -> f64>(f: &F, x: f64, dt: f64, u: f64, v: f64) -> (f64, f64) {
    let k1u = v;
    let k1v = f(x) * u;
    let fm = f(x + 0.5 * dt);
    let k2u = v + 0.5 * dt * k1v;
    let k2v = fm * (u + 0.5 * dt * k1u);
    let k3u = v + 0.5 * dt * k2v;
    let k3v = fm * (u + 0.5 * dt * k2u);
    let fe = f(x + dt);
    let k4u = v + dt * k3v;
    let k4v = fe * (u + dt * k3u);
    (
        u + dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
        v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
    )
}

/// Fourth-order first-derivative stencils applied to the α samples. Keeping
/// this independent of the differential equation makes the residual an actual
/// measurement of integration error rather than an identity.
fn derivative_samples(a: &[f64], h: f64) -> Vec<f64> {
    let n = a.len();
    let mut d = vec![0.0; n];
    d[0] = (-25.0 * a[0] + 48.0 * a[1] - 36.0 * a[2] + 16.0 * a[3] - 3.0 * a[4]) / (12.0 * h);
    d[1] = (-3.0 * a[0] - 10.0 * a[1] + 18.0 * a[2] - 6.0 * a[3] + a[4]) / (12.0 * h);
    for i in 2..n - 2 {
        d[i] = (a[i - 2] - 8.0 * a[i - 1] + 8.0 * a[i + 1] - a[i + 2]) / (12.0 * h);
    }
    d[n - 2] = (3.0 * a[n - 1] + 10.0 * a[n - 2] - 18.0 * a[n - 3] + 6.0 * a[n - 4] - a[n - 5])
        / (12.0 * h);
    d[n - 1] = (25.0 * a[n - 1] - 48.0 * a[n - 2] + 36.0 * a[n - 3] - 16.0 * a[n - 4]
        + 3.0 * a[n - 5])
        / (12.0 * h);
    d
}

enum Backend {
    Analytic(OscillatorAlpha),
    Numeric(NumericAlpha),
    Chained {
        at_e1: Box<RiccatiSolution>,
        at_e2: Box<RiccatiSolution>,
    },
}

impl Clone for Backend {
    fn clone(&self) -> Self {
        match self {
            Backend::Analytic(s) => Backend::Analytic(*s),
            Backend::Numeric(s) => Backend::Numeric(s.clone()),
            Backend::Chained { at_e1, at_e2 } => Backend::Chained {
                at_e1: at_e1.clone(),
                at_e2: at_e2.clone(),
            },
        }
    }
}

#[derive(Clone)]
enum Base {
    Oscillator,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    /// Potential one rung up the chain: V = base(V of parent) − α_parent′.
    Darboux(Box<RiccatiSolution>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    AnalyticOscillator,
    Numeric,
    Chained,
}

/// A concrete α(x, ε) together with the potential it solves against.
#[derive(Clone)]
pub struct RiccatiSolution {
    eps: f64,
    backend: Backend,
    base: Base,
}

impl std::fmt::Debug for RiccatiSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RiccatiSolution")
            .field("eps", &self.eps)
            .field("backend", &self.backend_kind())
            .finish()
    }
}

impl RiccatiSolution {
    pub fn analytic_oscillator(cfg: FactorizationConfig) -> Result<Self, RiccatiError> {
        Ok(Self {
            eps: cfg.eps(),
            backend: Backend::Analytic(OscillatorAlpha::new(cfg)?),
            base: Base::Oscillator,
        })
    }

    /// Chain two solutions of the same base problem into a solution at
    /// `at_e2.eps()` of the once-transformed potential V − α₁′:
    ///
    /// α₂ = −α₁(ε₁) − 2(ε₁ − ε₂)/(α₁(ε₁) − α₁(ε₂)).
    pub fn chained(at_e1: RiccatiSolution, at_e2: RiccatiSolution) -> Result<Self, RiccatiError> {
        if (at_e1.eps - at_e2.eps).abs() <= DEGENERACY_EPS {
            return Err(RiccatiError::DegenerateEnergies);
        }
        Ok(Self {
            eps: at_e2.eps,
            base: Base::Darboux(Box::new(at_e1.clone())),
            backend: Backend::Chained {
                at_e1: Box::new(at_e1),
                at_e2: Box::new(at_e2),
            },
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn backend_kind(&self) -> BackendKind {
        match self.backend {
            Backend::Analytic(_) => BackendKind::AnalyticOscillator,
            Backend::Numeric(_) => BackendKind::Numeric,
            Backend::Chained { .. } => BackendKind::Chained,
        }
    }

    /// (α, α′) at x.
    pub fn eval(&self, x: f64) -> Result<(f64, f64), RiccatiError> {
        match &self.backend {
            Backend::Analytic(s) => s.alpha(x),
            Backend::Numeric(s) => s.eval(x),
            Backend::Chained { at_e1, at_e2 } => {
                let (a1, d1) = at_e1.eval(x)?;
                let (a2, d2) = at_e2.eval(x)?;
                let delta = at_e1.eps - at_e2.eps;
                let den = a1 - a2;
                if den.abs() <= 1e-12 * (1.0 + a1.abs().max(a2.abs())) {
                    return Err(RiccatiError::DenominatorZero { x });
                }
                Ok((
                    -a1 - 2.0 * delta / den,
                    -d1 + 2.0 * delta * (d1 - d2) / (den * den),
                ))
            }
        }
    }

    /// Value of the potential this solution solves against.
    pub fn base_value(&self, x: f64) -> Result<f64, RiccatiError> {
        match &self.base {
            Base::Oscillator => Ok(0.5 * x * x),
            Base::Custom(f) => Ok(f(x)),
            Base::Darboux(parent) => Ok(parent.base_value(x)? - parent.eval(x)?.1),
        }
    }
}

/// Integrate H₀ψ = εψ outward from x = 0 with ψ(0) = 1, ψ′(0) = `psi0_slope`
/// and return α = ψ′/ψ sampled on `grid` (substeps capped at 1e−3; fourth
/// order). For the oscillator, psi0_slope = 2ν·gamma_ratio(ε) reproduces the
/// analytic branch. ψ must stay one-signed; (ψ, ψ′) are rescaled whenever
/// |ψ| exceeds 1e100 since only the ratio is kept.
pub fn alpha_numeric<F>(
    potential: F,
    eps: f64,
    psi0_slope: f64,
    grid: &Grid,
) -> Result<RiccatiSolution, RiccatiError>
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    let n = grid.n_points();
    if n < 9 || n.is_multiple_of(2) {
        return Err(RiccatiError::InvalidConfig(format!(
            "numeric backend needs an odd point count of at least 9 (got {n})"
        )));
    }
    if (grid.x_min() + grid.x_max()).abs() > 1e-9 * (grid.x_max() - grid.x_min()) {
        return Err(RiccatiError::InvalidConfig(
            "numeric backend needs a grid symmetric about 0".into(),
        ));
    }
    let h = grid.spacing();
    let f = {
        let p = &potential;
        move |x: f64| 2.0 * (p(x) - eps)
    };
    let mid = (n - 1) / 2;
    let mut a = vec![0.0_f64; n];
    a[mid] = psi0_slope;
    let substeps = (h / MAX_SUBSTEP).ceil().max(1.0) as usize;
    for dir in [1i64, -1i64] {
        let (mut u, mut v) = (1.0_f64, psi0_slope);
        let mut idx = mid as i64;
        while (dir > 0 && (idx as usize) < n - 1) || (dir < 0 && idx > 0) {
            let x_here = grid.point(idx as usize);
            if !f(x_here).is_finite() {
                return Err(RiccatiError::NonFinite { x: x_here });
            }
            let dt = dir as f64 * h / substeps as f64;
            for s in 0..substeps {
                let x = x_here + s as f64 * dt;
                let prev_sign = u.signum();
                let (nu_, nv_) = rk4_step(&f, x, dt, u, v);
                u = nu_;
                v = nv_;
                if u == 0.0 || u.signum() != prev_sign {
                    return Err(RiccatiError::SignChange { x: x + dt });
                }
                if u.abs() > RENORM_AT {
                    let s = 1.0 / u.abs();
                    u *= s;
                    v *= s;
                }
            }
            idx += dir;
            a[idx as usize] = v / u;
        }
    }
    let ap = derivative_samples(&a, h);
    Ok(RiccatiSolution {
        eps,
        backend: Backend::Numeric(NumericAlpha {
            x0: grid.x_min(),
            h,
            a,
            ap,
        }),
        base: Base::Custom(Arc::new(potential)),
    })
}

/// α′ + α² − 2(V − ε) at x; identically zero for an exact solution, so the
/// returned value measures the numerics of the backend at hand.
pub fn riccati_residual(sol: &RiccatiSolution, x: f64) -> Result<f64, RiccatiError> {
    let (a, ap) = sol.eval(x)?;
    Ok(ap + a * a - 2.0 * (sol.base_value(x)? - sol.eps))
}
