//! Physical parameters of the driven exciton / quasimode model.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("gamma must be finite and > 0 (got {0} meV)")]
    Gamma(f64),
    #[error("m_coupling must be finite and >= 0 (got {0} meV)")]
    Coupling(f64),
    #[error("xi must be finite and >= 0 (got {0} meV)")]
    Drive(f64),
    #[error("delta must be finite (got {0} meV)")]
    Detuning(f64),
    #[error("omega0 must be finite and > 0 (got {0} meV)")]
    Transition(f64),
}

/// Model constants, all energies in meV.
///
/// * `omega0` – transition energy Ω of the isolated exciton
/// * `gamma` – quasimode decay rate ħΓ
/// * `m_coupling` – collective coupling ħM = ħNη²L/c
/// * `xi` – collective drive amplitude ħξ = ħ√N·ℜ
/// * `delta` – detuning ħδ = ħ(ω − Ω) of the pump
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub omega0: f64,
    pub gamma: f64,
    pub m_coupling: f64,
    pub xi: f64,
    pub delta: f64,
}

/// Transition energy used when none is given. It cancels from every
/// observable; it only enters the full-phase state labels.
pub const DEFAULT_OMEGA0_MEV: f64 = 1500.0;

/// Which panel of the phase figure a parameter set belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fig2Variant {
    A,
    B,
    C,
}

impl std::str::FromStr for Fig2Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Self::A),
            "b" => Ok(Self::B),
            "c" => Ok(Self::C),
            other => Err(format!("unknown fig2 variant '{other}' (expected a, b or c)")),
        }
    }
}

impl SystemParams {
    pub fn new(
        omega0: f64,
        gamma: f64,
        m_coupling: f64,
        xi: f64,
        delta: f64,
    ) -> Result<Self, ParamError> {
        let p = Self {
            omega0,
            gamma,
            m_coupling,
            xi,
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    /// ħΓ = 0.05 meV, ħM = 20 meV, ħξ = 10 meV, ħδ = 0.1 meV.
    pub fn fig1() -> Self {
        Self {
            omega0: DEFAULT_OMEGA0_MEV,
            gamma: 0.05,
            m_coupling: 20.0,
            xi: 10.0,
            delta: 0.1,
        }
    }

    /// ħΓ = ħM = 20 meV with the (δ, ξ) of panel b.
    pub fn fig2() -> Self {
        Self::fig2_variant(Fig2Variant::B, 10.0)
    }

    /// Panel a has δ = 0 and two drive strengths; `xi` selects which.
    /// Panels b and c ignore `xi` and use ħξ = 10 meV.
    pub fn fig2_variant(variant: Fig2Variant, xi: f64) -> Self {
        let (delta, xi) = match variant {
            Fig2Variant::A => (0.0, xi),
            Fig2Variant::B => (0.5, 10.0),
            Fig2Variant::C => (1.0, 10.0),
        };
        Self {
            omega0: DEFAULT_OMEGA0_MEV,
            gamma: 20.0,
            m_coupling: 20.0,
            xi,
            delta,
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(ParamError::Gamma(self.gamma));
        }
        if !(self.m_coupling.is_finite() && self.m_coupling >= 0.0) {
            return Err(ParamError::Coupling(self.m_coupling));
        }
        if !(self.xi.is_finite() && self.xi >= 0.0) {
            return Err(ParamError::Drive(self.xi));
        }
        if !self.delta.is_finite() {
            return Err(ParamError::Detuning(self.delta));
        }
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(ParamError::Transition(self.omega0));
        }
        if self.omega0 < 10.0 * self.gamma {
            log::warn!(
                "omega0 = {} meV is not much larger than gamma = {} meV; \
                 the Lorentzian kernel assumes Ω ≫ Γ",
                self.omega0,
                self.gamma
            );
        }
        Ok(())
    }

    pub fn with_xi(mut self, xi: f64) -> Self {
        self.xi = xi;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_m_coupling(mut self, m: f64) -> Self {
        self.m_coupling = m;
        self
    }

    /// Θ² = MΓ − (Γ/2)², meV².
    pub fn theta_sq(&self) -> f64 {
        self.m_coupling * self.gamma - 0.25 * self.gamma * self.gamma
    }

    /// Quasimode lifetime τ_p = ħ/Γ in fs.
    pub fn quasimode_lifetime_fs(&self) -> f64 {
        crate::units::UnitSystem::lifetime_fs(self.gamma)
    }
}

/// A complex energy (meV). Houses Θ, which turns imaginary when overdamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexRate {
    pub re: f64,
    pub im: f64,
}

impl ComplexRate {
    pub fn as_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl From<Complex64> for ComplexRate {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexRate> for Complex64 {
    fn from(r: ComplexRate) -> Self {
        r.as_complex()
    }
}

/// Θ = √(MΓ − (Γ/2)²), principal root: real when underdamped, positive
/// imaginary when overdamped, exactly zero at critical damping.
pub fn theta(params: &SystemParams) -> ComplexRate {
    let sq = params.theta_sq();
    if sq >= 0.0 {
        ComplexRate { re: sq.sqrt(), im: 0.0 }
    } else {
        ComplexRate {
            re: 0.0,
            im: (-sq).sqrt(),
        }
    }
}
