//! Closed-form time-dependent coefficients of the normally ordered
//! evolution operator, plus the bath coupling and memory kernel.
//!
//! All coefficients are rotating-frame envelopes: the global e^{−iΩt} that
//! multiplies the exciton and field labels is left out (see
//! [`crate::observables::PhasePolicy`] for where it comes back).
//!
//! The Laplace images are
//!
//! ```text
//! ũ[s]   = (s + Γ) / (s² + Γs + MΓ)
//! w̃[s]   = −iξ ũ[s] / (s + iδ)
//! ũ_j[s] = −ig_j ũ[s] / (s + iε_j),        ε_j = ω_j − Ω
//! ṽ_j[s] = −ig_j w̃[s] / (s + iε_j)
//! ```
//!
//! and each is inverted exactly by residues, with the damped pole pair
//! −Γ/2 ± iΘ handled as one quadratic factor.

use num_complex::Complex64;

use crate::laplace::{split_pole, DampedPair, PairResponse};
use crate::oracle::BathGrid;
use crate::params::SystemParams;
use crate::units::UnitSystem;

/// Two poles closer than this (meV) are treated as coincident.
pub const POLE_COLLISION_MEV: f64 = 1e-9;
/// Mode-energy shift, in units of Γ, applied on a pole collision.
pub const POLE_SHIFT_GAMMAS: f64 = 1e-7;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn damped_pair(params: &SystemParams) -> DampedPair {
    DampedPair {
        sigma: c(-0.5 * params.gamma, 0.0),
        theta_sq: c(params.theta_sq(), 0.0),
    }
}

/// ũ[s] = 1/(s + K̃[s]) with K̃[s] = MΓ/(s + Γ).
pub fn u_laplace(params: &SystemParams, s: Complex64) -> Complex64 {
    (s + params.gamma) / damped_pair(params).q(s)
}

/// L⁻¹{ũ[s]/(s − p)} = k e^{px} + (pair part). The building block for
/// w, u_j, v_j and A.
#[derive(Debug, Clone, Copy)]
struct PoleResponse {
    pole: Complex64,
    k: Complex64,
    rest: PairResponse,
}

impl PoleResponse {
    fn new(params: &SystemParams, pole: Complex64) -> Self {
        let (k, rest) = split_pole(
            c(1.0, 0.0),
            c(params.gamma, 0.0),
            damped_pair(params),
            pole,
        );
        Self { pole, k, rest }
    }

    fn eval(&self, x: f64) -> Complex64 {
        self.k * (self.pole * x).exp() + self.rest.eval(x)
    }

    /// ∫₀ˣ e^{−px′} f(x′) dx′.
    fn demodulated_integral(&self, x: f64) -> Complex64 {
        let (k0, g) = self.rest.times_exp(-self.pole).antiderivative();
        self.k * x + k0 + g.eval(x)
    }
}

fn neg_i(z: Complex64) -> Complex64 {
    c(z.im, -z.re)
}

/// Equation for u(t) = [cos Θt + (Γ/2Θ) sin Θt] e^{−Γt/2}; t in fs.
pub fn coeff_u(params: &SystemParams, t: f64) -> Complex64 {
    let x = UnitSystem::reduced_time(t);
    PairResponse {
        pair: damped_pair(params),
        c1: c(1.0, 0.0),
        c0: c(params.gamma, 0.0),
    }
    .eval(x)
}

/// ξ-independent part of w: w = ξ · unit_w.
fn unit_w(params: &SystemParams, x: f64) -> Complex64 {
    neg_i(PoleResponse::new(params, c(0.0, -params.delta)).eval(x))
}

/// Driven exciton amplitude w(t).
pub fn coeff_w(params: &SystemParams, t: f64) -> Complex64 {
    unit_w(params, UnitSystem::reduced_time(t)) * params.xi
}

/// Field amplitude u_j(t) of the mode at absolute energy `omega_j` with
/// coupling `g_j` (both meV), for unit initial exciton label.
pub fn coeff_u_j(params: &SystemParams, omega_j: f64, g_j: f64, t: f64) -> Complex64 {
    let eps = omega_j - params.omega0;
    let x = UnitSystem::reduced_time(t);
    neg_i(PoleResponse::new(params, c(0.0, -eps)).eval(x)) * g_j
}

/// Result of [`coeff_v_j`]; `shifted_omega` is set when the mode energy
/// had to be moved off a pole collision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeAmplitude {
    pub value: Complex64,
    pub shifted_omega: Option<f64>,
}

/// Drive-induced field amplitude v_j(t).
///
/// ṽ_j = −g_j ξ ũ/[(s+iδ)(s+iε_j)]; the two drive/mode poles are split by
/// partial fractions. When they coincide (ε_j = δ) the mode energy is
/// nudged by 10⁻⁷Γ and the nudged energy is reported.
pub fn coeff_v_j(params: &SystemParams, omega_j: f64, g_j: f64, t: f64) -> ModeAmplitude {
    let mut eps = omega_j - params.omega0;
    let mut shifted_omega = None;
    if (eps - params.delta).abs() < POLE_COLLISION_MEV {
        eps += POLE_SHIFT_GAMMAS * params.gamma;
        shifted_omega = Some(params.omega0 + eps);
    }
    let x = UnitSystem::reduced_time(t);
    let p = c(0.0, -params.delta);
    let q = c(0.0, -eps);
    let drive = PoleResponse::new(params, p).eval(x);
    let mode = PoleResponse::new(params, q).eval(x);
    let unit = -(drive - mode) / (p - q) * g_j;
    ModeAmplitude {
        value: unit * params.xi,
        shifted_omega,
    }
}

/// Vacuum-amplitude coefficient A(t) = −iξ ∫₀ᵗ w(t′) e^{iδt′} dt′,
/// integrated term by term in closed form.
pub fn coeff_a(params: &SystemParams, t: f64) -> Complex64 {
    let x = UnitSystem::reduced_time(t);
    let integral = PoleResponse::new(params, c(0.0, -params.delta)).demodulated_integral(x);
    // A = (−iξ)(−iξ) ∫ ũ-response = −ξ² ∫ …
    -integral * (params.xi * params.xi)
}

/// Coefficient of α in the exponent, B(t) = w(t) e^{iδt}.
pub fn coeff_b(params: &SystemParams, t: f64) -> Complex64 {
    let x = UnitSystem::reduced_time(t);
    coeff_w(params, t) * c(0.0, params.delta * x).exp()
}

/// Envelope w∞ with w(t) → w∞ e^{−iδt} once the transient has decayed.
pub fn steady_state_w(params: &SystemParams) -> Complex64 {
    let p = c(0.0, -params.delta);
    neg_i(PoleResponse::new(params, p).k) * params.xi
}

/// Continuum coupling g(ω_j) = √N ηΓ/√((ω_j − Ω)² + Γ²).
pub fn coupling_g(omega_j: f64, eta: f64, gamma: f64, omega0: f64, n_atoms: u64) -> f64 {
    let d = omega_j - omega0;
    (n_atoms as f64).sqrt() * eta * gamma / (d * d + gamma * gamma).sqrt()
}

/// Memory kernel K(τ) = MΓ e^{−Γ|τ|} in meV², τ in fs.
pub fn kernel_k(params: &SystemParams, tau: f64) -> Complex64 {
    let x = UnitSystem::reduced_time(tau).abs();
    c(params.m_coupling * params.gamma * (-params.gamma * x).exp(), 0.0)
}

/// All coefficients at one instant, per-mode arrays aligned to a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionCoefficients {
    pub t: f64,
    pub u: Complex64,
    pub w: Complex64,
    pub a_coef: Complex64,
    pub b_coef: Complex64,
    pub u_j: Vec<Complex64>,
    pub v_j: Vec<Complex64>,
    /// Grid indices whose v_j needed a pole-collision shift.
    pub regularized_modes: Vec<usize>,
}

impl EvolutionCoefficients {
    pub fn evaluate(params: &SystemParams, grid: &BathGrid, t: f64) -> Self {
        let mut u_j = Vec::with_capacity(grid.len());
        let mut v_j = Vec::with_capacity(grid.len());
        let mut regularized_modes = Vec::new();
        for (j, (&omega, &kappa)) in grid
            .mode_energies
            .iter()
            .zip(grid.couplings.iter())
            .enumerate()
        {
            u_j.push(coeff_u_j(params, omega, kappa, t));
            let v = coeff_v_j(params, omega, kappa, t);
            if v.shifted_omega.is_some() {
                regularized_modes.push(j);
            }
            v_j.push(v.value);
        }
        Self {
            t,
            u: coeff_u(params, t),
            w: coeff_w(params, t),
            a_coef: coeff_a(params, t),
            b_coef: coeff_b(params, t),
            u_j,
            v_j,
            regularized_modes,
        }
    }
}
