//! Inverse Laplace transforms of the rational images that appear in the
//! coefficient solutions.
//!
//! Every image has the form N(s) / [Q(s) Π(s − p_k)] where
//! Q(s) = (s − σ)² + Θ² carries the damped pole pair σ ± iΘ. Simple poles
//! p_k are peeled off by partial fractions; what remains is a linear
//! numerator over Q, which inverts to e^{σx}[c₁(cos Θx + σ sin Θx/Θ) +
//! c₀ sin Θx/Θ]. Both trigonometric factors are even in Θ, so they are
//! evaluated from Θ² and stay finite through critical damping.

use num_complex::Complex64;

const SERIES_CUTOFF: f64 = 1e-4;

/// Damped pole pair σ ± iΘ, stored as (σ, Θ²).
#[derive(Debug, Clone, Copy)]
pub(crate) struct DampedPair {
    pub sigma: Complex64,
    pub theta_sq: Complex64,
}

impl DampedPair {
    /// Q(s) = (s − σ)² + Θ².
    pub fn q(&self, s: Complex64) -> Complex64 {
        let d = s - self.sigma;
        d * d + self.theta_sq
    }

    /// (e^{σx} cos Θx, e^{σx} sin Θx / Θ).
    pub fn cos_sinc(&self, x: f64) -> (Complex64, Complex64) {
        let z = self.theta_sq * (x * x);
        if z.norm() < SERIES_CUTOFF * SERIES_CUTOFF {
            let env = (self.sigma * x).exp();
            let c = 1.0 - z / 2.0 + z * z / 24.0 - z * z * z / 720.0;
            let s = x * (1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0);
            (env * c, env * s)
        } else {
            // Split into e^{(σ±iΘ)x} so a growing cosh never meets a
            // decaying envelope separately.
            let th = self.theta_sq.sqrt();
            let i = Complex64::i();
            let plus = ((self.sigma + i * th) * x).exp();
            let minus = ((self.sigma - i * th) * x).exp();
            ((plus + minus) * 0.5, (plus - minus) / (2.0 * i * th))
        }
    }

    /// Shift s → s − λ, i.e. multiply the time function by e^{λx}.
    pub fn shifted(&self, lambda: Complex64) -> Self {
        Self {
            sigma: self.sigma + lambda,
            theta_sq: self.theta_sq,
        }
    }
}

/// L⁻¹{(c₁ s + c₀) / Q(s)}.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PairResponse {
    pub pair: DampedPair,
    pub c1: Complex64,
    pub c0: Complex64,
}

impl PairResponse {
    pub fn eval(&self, x: f64) -> Complex64 {
        let (c, s) = self.pair.cos_sinc(x);
        self.c1 * (c + self.pair.sigma * s) + self.c0 * s
    }

    /// The same function multiplied by e^{λx}.
    pub fn times_exp(&self, lambda: Complex64) -> Self {
        Self {
            pair: self.pair.shifted(lambda),
            c1: self.c1,
            c0: self.c0 - self.c1 * lambda,
        }
    }

    /// ∫₀ˣ f = k + g(x) with g another pair response; returns (k, g).
    /// Requires Q(0) ≠ 0.
    pub fn antiderivative(&self) -> (Complex64, PairResponse) {
        split_pole(self.c1, self.c0, self.pair, Complex64::new(0.0, 0.0))
    }
}

/// (a s + b) / [Q(s)(s − p)] = k/(s − p) + (c₁ s + c₀)/Q(s).
/// Requires Q(p) ≠ 0.
pub(crate) fn split_pole(
    a: Complex64,
    b: Complex64,
    pair: DampedPair,
    p: Complex64,
) -> (Complex64, PairResponse) {
    let k = (a * p + b) / pair.q(p);
    // Q(s) = s² + q1 s + q0 with q1 = −2σ; match the s¹ coefficient.
    let q1 = -2.0 * pair.sigma;
    let c1 = -k;
    let c0 = a - k * (q1 + p);
    (k, PairResponse { pair, c1, c0 })
}
