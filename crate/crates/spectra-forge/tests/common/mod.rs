//! Shared helpers for the integration targets: a compact double-double
//! type for reference-grade values, reference special functions built on
//! it, and a finite-difference Rayleigh quotient.

#![allow(dead_code)] // each test target pulls only what it needs

use spectra_forge::transforms::GroundStateFunction;
use spectra_forge::{GeneratedPotential, Grid};

/// Unevaluated sum hi + lo with |lo| ≤ ulp(hi)/2; roughly 32 significant
/// digits, enough to act as an oracle for f64 results.
#[derive(Debug, Clone, Copy)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Assumes |a| ≥ |b|.
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }

    /// Exact sum of two doubles as a Dd; the building block that keeps
    /// series factors like a + k free of input rounding.
    pub fn sum2(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_sum(a, b);
        Dd { hi, lo }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(p, e + self.hi * o.lo + self.lo * o.hi);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, m: f64) -> Dd {
        self.mul(Dd::new(m))
    }

    pub fn div_f64(self, d: f64) -> Dd {
        let q = self.hi / d;
        let (p, e) = two_prod(q, d);
        let r = ((self.hi - p) - e + self.lo) / d;
        let (hi, lo) = quick_two_sum(q, r);
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r1 = self.add(o.mul_f64(-q1));
        let q2 = r1.hi / o.hi;
        let r2 = r1.add(o.mul_f64(-q2));
        let q3 = r2.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::new(q3))
    }

    pub fn abs(self) -> f64 {
        self.value().abs()
    }
}

/// 2/√π split across two doubles.
pub const TWO_OVER_SQRT_PI: Dd = Dd {
    hi: std::f64::consts::FRAC_2_SQRT_PI,
    lo: 1.533545961316588e-17,
};

/// Taylor-series erf accumulated in double-double arithmetic; the result
/// is correct to well under 1e-20 for |x| ≤ 3.5.
pub fn erf_dd(x: f64) -> f64 {
    let x2 = Dd::new(x).mul(Dd::new(x));
    let mut term = Dd::new(x);
    let mut sum = Dd::new(x);
    for k in 1..400 {
        term = term.mul(x2).div_f64(-(k as f64));
        let add = term.div_f64((2 * k + 1) as f64);
        sum = sum.add(add);
        if add.abs() < 1e-24 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum.mul(TWO_OVER_SQRT_PI).value()
}

/// Direct Kummer series Σ (a)ₖ zᵏ / ((b)ₖ k!) in double-double arithmetic.
/// The factors a + k and b + k are formed exactly (two_sum), since the
/// alternating cancellation at z = −30 amplifies any factor rounding by
/// the sum's condition number; with exact factors the result stays an
/// oracle for f64 across z ∈ [−30, 0].
pub fn kummer_dd(a: f64, b: f64, z: f64) -> f64 {
    let mut term = Dd::new(1.0);
    let mut sum = Dd::new(1.0);
    for k in 0..1000 {
        let kf = k as f64;
        term = term
            .mul(Dd::sum2(a, kf))
            .mul(Dd::new(z))
            .div(Dd::sum2(b, kf))
            .div_f64(kf + 1.0);
        sum = sum.add(term);
        if term.abs() < 1e-24 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum.value()
}

/// ⟨ψ|H|ψ⟩ / ⟨ψ|ψ⟩ with a central second difference on ψ's own grid.
pub fn rayleigh_quotient(psi: &GroundStateFunction, v: &GeneratedPotential) -> f64 {
    let grid: &Grid = psi.grid();
    let s = psi.samples();
    let h = grid.spacing();
    let n = s.len();
    let (mut num, mut den) = (0.0_f64, 0.0_f64);
    for i in 1..n - 1 {
        let lap = (s[i - 1] - 2.0 * s[i] + s[i + 1]) / (h * h);
        let hv = -0.5 * lap + v.value(grid.point(i)).expect("inside domain") * s[i];
        num += s[i] * hv * h;
        den += s[i] * s[i] * h;
    }
    num / den
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + i as f64 * h).collect()
}
