//! Brute-force verifiers for the closed forms.
//!
//! The continuum bath is replaced by a finite, evenly spaced set of modes
//! with Lorentzian-weighted couplings, and the resulting linear equations
//! are stepped with classic fixed-step RK4 in the frame rotating at Ω.
//! Nothing in this module evaluates the closed-form coefficients; the
//! analytic side only enters through [`compare`].

mod compare;
mod integrate;

pub use compare::{
    compare_runs, AnalyticTrace, Channel, ChannelError, ComparisonReport, Tolerance,
};
pub use integrate::{
    decoherence_from_run, integrate_coefficient_odes, integrate_mode_equations,
    oracle_decoherence_factor, oracle_decoherence_series, solve_volterra_u, ModeChannel,
};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::params::{theta, SystemParams};
use crate::units::{UnitSystem, HBAR_MEV_FS};

/// Smallest accepted mode count.
pub const MIN_MODES: usize = 101;
/// Smallest accepted half-width, in units of Γ.
pub const MIN_WINDOW_GAMMAS: f64 = 20.0;
/// Default mode count.
pub const DEFAULT_MODES: usize = 4001;
/// Default half-width, in units of Γ.
pub const DEFAULT_WINDOW_GAMMAS: f64 = 50.0;
/// Steps must satisfy dt ≤ STEP_RULE · ħ / (fastest rate).
pub const STEP_RULE: f64 = 0.01;
/// Longest accepted run, in steps.
pub const MAX_STEPS: usize = 1_000_000;
/// A label larger than this aborts the run.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("bath grid needs an odd mode count >= {MIN_MODES} (got {0}); try {hint}", hint = suggest_odd(*.0))]
    ModeCount(usize),
    #[error("bath grid half-width {window} meV is below {MIN_WINDOW_GAMMAS}Γ = {min} meV; widen the window")]
    Window { window: f64, min: f64 },
    #[error("step {dt} fs exceeds the stability bound {limit} fs (rule dt <= {STEP_RULE} ħ/{rate} meV)")]
    StepTooLarge { dt: f64, limit: f64, rate: f64 },
    #[error("run needs {0} steps, more than the {MAX_STEPS} allowed")]
    TooManySteps(usize),
    #[error("invalid step plan: {0}")]
    BadPlan(String),
    #[error("integration diverged at t = {t} fs: |{what}| = {magnitude:e}")]
    Divergence {
        t: f64,
        what: &'static str,
        magnitude: f64,
    },
    #[error("time grids are misaligned: {0}")]
    Misaligned(String),
    #[error("run does not contain channel {0}")]
    MissingChannel(String),
}

fn suggest_odd(j: usize) -> usize {
    let j = j.max(MIN_MODES);
    if j % 2 == 0 {
        j + 1
    } else {
        j
    }
}

/// Discretized Lorentzian bath, symmetric about Ω.
///
/// Mode j sits at ω_j = Ω + (j − (J−1)/2)Δω with Δω = 2W/(J−1) and couples
/// with κ_j = √[(MΓ²/π) Δω / ((ω_j − Ω)² + Γ²)], so that Σ_j κ_j² e^{−iε_jτ}
/// is a Riemann sum for the continuum kernel MΓe^{−Γ|τ|}.
#[derive(Debug, Clone, PartialEq)]
pub struct BathGrid {
    pub j_count: usize,
    /// Half-width W, meV.
    pub window: f64,
    pub omega0: f64,
    /// Δω, meV.
    pub spacing: f64,
    /// Absolute mode energies ω_j, meV.
    pub mode_energies: Vec<f64>,
    /// κ_j, meV.
    pub couplings: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridMeta {
    pub j_count: usize,
    pub window_mev: f64,
    pub spacing_mev: f64,
}

pub fn build_bath_grid(
    params: &SystemParams,
    j_count: usize,
    window: f64,
) -> Result<BathGrid, OracleError> {
    if j_count < MIN_MODES || j_count % 2 == 0 {
        return Err(OracleError::ModeCount(j_count));
    }
    let min = MIN_WINDOW_GAMMAS * params.gamma;
    // Relative slack so that W = 20Γ computed as 20.0 * Γ is accepted.
    if !(window.is_finite() && window >= min * (1.0 - 1e-12)) {
        return Err(OracleError::Window { window, min });
    }
    let half = (j_count - 1) / 2;
    let spacing = 2.0 * window / (j_count - 1) as f64;
    if spacing >= 0.1 * params.gamma {
        log::debug!(
            "grid spacing {spacing} meV does not resolve the Lorentzian (Γ = {} meV)",
            params.gamma
        );
    }
    let weight = params.m_coupling * params.gamma * params.gamma / std::f64::consts::PI * spacing;
    let g2 = params.gamma * params.gamma;
    let mut mode_energies = Vec::with_capacity(j_count);
    let mut couplings = Vec::with_capacity(j_count);
    for j in 0..j_count {
        let eps = (j as f64 - half as f64) * spacing;
        mode_energies.push(params.omega0 + eps);
        couplings.push((weight / (eps * eps + g2)).sqrt());
    }
    Ok(BathGrid {
        j_count,
        window,
        omega0: params.omega0,
        spacing,
        mode_energies,
        couplings,
    })
}

impl BathGrid {
    /// Grid with `window_gammas`·Γ half-width.
    pub fn with_multiplier(
        params: &SystemParams,
        j_count: usize,
        window_gammas: f64,
    ) -> Result<Self, OracleError> {
        build_bath_grid(params, j_count, window_gammas * params.gamma)
    }

    pub fn default_for(params: &SystemParams) -> Self {
        Self::with_multiplier(params, DEFAULT_MODES, DEFAULT_WINDOW_GAMMAS)
            .expect("default grid is valid")
    }

    pub fn len(&self) -> usize {
        self.j_count
    }

    pub fn is_empty(&self) -> bool {
        self.j_count == 0
    }

    pub fn center_index(&self) -> usize {
        (self.j_count - 1) / 2
    }

    /// ε_j = ω_j − Ω.
    pub fn detunings(&self) -> Vec<f64> {
        self.mode_energies.iter().map(|w| w - self.omega0).collect()
    }

    /// Whether Δω < Γ/10.
    pub fn resolves_lorentzian(&self, gamma: f64) -> bool {
        self.spacing < 0.1 * gamma
    }

    pub fn coupling_sum(&self) -> f64 {
        self.couplings.iter().map(|k| k * k).sum()
    }

    /// MΓ·(2/π)·arctan(W/Γ), the J → ∞ limit of [`Self::coupling_sum`].
    pub fn continuum_coupling_sum(&self, params: &SystemParams) -> f64 {
        params.m_coupling * params.gamma * std::f64::consts::FRAC_2_PI
            * (self.window / params.gamma).atan()
    }

    /// Kernel weight missing from the grid, MΓ − Σκ_j² (meV²). This is the
    /// part of the Lorentzian outside ±W and is reported, not corrected.
    pub fn kernel_truncation(&self, params: &SystemParams) -> f64 {
        params.m_coupling * params.gamma - self.coupling_sum()
    }

    /// Discrete kernel Σ_j κ_j² e^{−iε_jτ}, τ in fs.
    pub fn kernel(&self, tau: f64) -> Complex64 {
        let x = UnitSystem::reduced_time(tau);
        self.mode_energies
            .iter()
            .zip(&self.couplings)
            .map(|(w, k)| k * k * Complex64::new(0.0, -(w - self.omega0) * x).exp())
            .sum()
    }

    pub fn meta(&self) -> GridMeta {
        GridMeta {
            j_count: self.j_count,
            window_mev: self.window,
            spacing_mev: self.spacing,
        }
    }
}

/// Fastest rate (meV) a grid integration has to resolve.
pub fn fastest_rate(params: &SystemParams, window: Option<f64>) -> f64 {
    let th = theta(params);
    let th = th.re.abs().max(th.im.abs());
    let mut rate = params.gamma.max(th).max(params.delta.abs());
    if let Some(w) = window {
        rate = rate.max(w);
    }
    rate
}

/// Fixed-step schedule: `steps` steps of `dt` fs, recording every
/// `record_every` steps (the first and last step are always recorded).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPlan {
    pub steps: usize,
    pub dt: f64,
    pub record_every: usize,
}

impl StepPlan {
    /// Reach `t_end` with steps no longer than `dt`.
    pub fn fixed(t_end: f64, dt: f64, record_every: usize) -> Result<Self, OracleError> {
        if !(t_end > 0.0 && dt > 0.0 && t_end.is_finite() && dt.is_finite()) {
            return Err(OracleError::BadPlan(format!("t_end = {t_end}, dt = {dt}")));
        }
        if record_every == 0 {
            return Err(OracleError::BadPlan("record_every must be >= 1".into()));
        }
        let steps = (t_end / dt * (1.0 - 1e-12)).ceil().max(1.0);
        if steps > MAX_STEPS as f64 {
            return Err(OracleError::TooManySteps(steps as usize));
        }
        let steps = steps as usize;
        Ok(Self {
            steps,
            dt: t_end / steps as f64,
            record_every,
        })
    }

    /// Step from the stability rule dt ≤ rule·ħ/rate, rounded so that
    /// `samples` equal intervals land exactly on steps.
    pub fn from_rule(
        t_end: f64,
        rate_mev: f64,
        rule: f64,
        samples: usize,
    ) -> Result<Self, OracleError> {
        if samples == 0 || !(rule > 0.0) || !(rate_mev > 0.0) {
            return Err(OracleError::BadPlan(format!(
                "samples = {samples}, rule = {rule}, rate = {rate_mev}"
            )));
        }
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(OracleError::BadPlan(format!("t_end = {t_end}")));
        }
        let dt_max = rule * HBAR_MEV_FS / rate_mev;
        let per_sample = (t_end / samples as f64 / dt_max * (1.0 - 1e-12)).ceil().max(1.0);
        let steps = per_sample * samples as f64;
        if steps > MAX_STEPS as f64 {
            return Err(OracleError::TooManySteps(steps as usize));
        }
        Ok(Self {
            steps: steps as usize,
            dt: t_end / steps,
            record_every: per_sample as usize,
        })
    }

    pub fn t_end(&self) -> f64 {
        self.dt * self.steps as f64
    }

    /// Recorded times in fs.
    pub fn record_times(&self) -> Vec<f64> {
        let mut out: Vec<f64> = (0..=self.steps)
            .step_by(self.record_every)
            .map(|k| k as f64 * self.dt)
            .collect();
        if self.steps % self.record_every != 0 {
            out.push(self.t_end());
        }
        out
    }

    pub(crate) fn check_rate(&self, rate_mev: f64) -> Result<(), OracleError> {
        let limit = STEP_RULE * HBAR_MEV_FS / rate_mev;
        if self.dt > limit * (1.0 + 1e-9) {
            return Err(OracleError::StepTooLarge {
                dt: self.dt,
                limit,
                rate: rate_mev,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OracleMethod {
    /// Coherent-label equations, unit exciton label, no drive.
    ModeEquationsU,
    /// Coherent-label equations, vacuum exciton label, with drive.
    ModeEquationsW,
    /// All coefficient equations at once (u, w, A, B, u_j, v_j).
    CoefficientOdes,
    /// Memory-kernel equation for u only.
    Volterra,
}

/// Recorded trajectory of an oracle run. Channels a method does not
/// produce are left empty; `uj_path`/`vj_path` are indexed [time][mode].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRun {
    pub times: Vec<f64>,
    pub u_path: Vec<Complex64>,
    pub w_path: Vec<Complex64>,
    pub a_path: Vec<Complex64>,
    pub b_path: Vec<Complex64>,
    pub uj_path: Vec<Vec<Complex64>>,
    pub vj_path: Vec<Vec<Complex64>>,
    pub step_size: f64,
    pub method: OracleMethod,
    pub grid: Option<GridMeta>,
}

/// Coefficients of the normally ordered evolution operator restored from
/// the rotating-frame envelopes of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RawCoefficients {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub c_j: Vec<Complex64>,
    pub e_j: Vec<Complex64>,
}

impl OracleRun {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// D = u e^{−iΩt} − 1, C = w e^{−iΩt}, C_j = u_j e^{−iΩt},
    /// E_j = v_j e^{−iΩt}; A and B are integrated directly. Only meaningful
    /// for [`OracleMethod::CoefficientOdes`] runs.
    pub fn raw_coefficients(&self, row: usize, omega0: f64) -> Option<RawCoefficients> {
        if self.method != OracleMethod::CoefficientOdes || row >= self.len() {
            return None;
        }
        let x = UnitSystem::reduced_time(self.times[row]);
        let phase = Complex64::new(0.0, -omega0 * x).exp();
        Some(RawCoefficients {
            a: self.a_path[row],
            b: self.b_path[row],
            c: self.w_path[row] * phase,
            d: self.u_path[row] * phase - 1.0,
            c_j: self.uj_path[row].iter().map(|z| z * phase).collect(),
            e_j: self.vj_path[row].iter().map(|z| z * phase).collect(),
        })
    }

    /// Sum-rule residual |α|² − [Σ|αu_j+v_j|² + |αu+w|² + 2Re(A + Bα)] at
    /// one recorded row. Requires a coefficient-ODE run.
    pub fn sum_rule_residual(&self, row: usize, alpha: Complex64) -> Option<f64> {
        if self.method != OracleMethod::CoefficientOdes || row >= self.len() {
            return None;
        }
        let fields: f64 = self.uj_path[row]
            .iter()
            .zip(&self.vj_path[row])
            .map(|(u, v)| (alpha * u + v).norm_sqr())
            .sum();
        let exciton = (alpha * self.u_path[row] + self.w_path[row]).norm_sqr();
        let vac = 2.0 * (self.a_path[row] + self.b_path[row] * alpha).re;
        Some(alpha.norm_sqr() - (fields + exciton + vac))
    }
}
