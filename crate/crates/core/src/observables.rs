//! Observables built on the closed-form coefficients: exciton population,
//! evolved product and cat states, and the decoherence factor of a cat.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::model::{coeff_a, coeff_b, coeff_u, coeff_u_j, coeff_v_j, coeff_w};
use crate::oracle::BathGrid;
use crate::params::SystemParams;
use crate::units::UnitSystem;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObservableError {
    #[error("cat weights c1 and c2 are both zero")]
    ZeroWeights,
    #[error("branches coincide; no decoherence timescale")]
    NoDecoherence,
    #[error("gamma must be > 0 (got {0} meV)")]
    Gamma(f64),
}

/// Two-branch superposition c₁|α₁⟩ + c₂|α₂⟩ of exciton coherent states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatSpec {
    pub c1: Complex64,
    pub c2: Complex64,
    pub alpha1: Complex64,
    pub alpha2: Complex64,
}

impl CatSpec {
    pub fn new(
        c1: Complex64,
        c2: Complex64,
        alpha1: Complex64,
        alpha2: Complex64,
    ) -> Result<Self, ObservableError> {
        if c1.norm() == 0.0 && c2.norm() == 0.0 {
            return Err(ObservableError::ZeroWeights);
        }
        Ok(Self {
            c1,
            c2,
            alpha1,
            alpha2,
        })
    }

    /// α₁ = α, α₂ = α e^{iΔφ}.
    pub fn phase_shift(
        alpha: Complex64,
        dphi: f64,
        c1: Complex64,
        c2: Complex64,
    ) -> Result<Self, ObservableError> {
        Self::new(c1, c2, alpha, alpha * Complex64::from_polar(1.0, dphi))
    }

    /// Δφ = arg(α₂/α₁), only when |α₁| = |α₂| (to 10⁻¹²) and α₁ ≠ 0.
    pub fn dphi(&self) -> Option<f64> {
        let (m1, m2) = (self.alpha1.norm(), self.alpha2.norm());
        if m1 == 0.0 || (m1 - m2).abs() > 1e-12 * m1.max(1.0) {
            return None;
        }
        Some((self.alpha2 / self.alpha1).arg())
    }

    pub fn distance(&self) -> f64 {
        cat_distance(self.alpha1, self.alpha2)
    }
}

/// Where the fast e^{−iΩt} of the state labels goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhasePolicy {
    /// Rotating-frame envelopes (the default; Ω cancels in observables).
    #[default]
    Envelope,
    /// Multiply labels by e^{−iΩt}.
    Full,
}

/// One branch of the evolved state: a phase, the exciton coherent label
/// and the field coherent labels on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchState {
    pub prefactor_phase: Complex64,
    pub exciton_label: Complex64,
    pub field_labels: Vec<Complex64>,
}

/// n̄(t) = n̄₀|u|² + |w|² + (αuw* + c.c.), n̄₀ = |α|².
pub fn mean_number(params: &SystemParams, alpha: Complex64, t: f64) -> f64 {
    let u = coeff_u(params, t);
    let w = coeff_w(params, t);
    alpha.norm_sqr() * u.norm_sqr() + w.norm_sqr() + 2.0 * (alpha * u * w.conj()).re
}

/// [`mean_number`] for α = √n̄₀ e^{iθ}, taking n̄₀ itself so that n̄(0)
/// reproduces it exactly (√n̄₀² need not round back to n̄₀).
pub fn mean_number_n0(params: &SystemParams, n0: f64, theta: f64, t: f64) -> f64 {
    let u = coeff_u(params, t);
    let w = coeff_w(params, t);
    let alpha = Complex64::from_polar(n0.sqrt(), theta);
    n0 * u.norm_sqr() + w.norm_sqr() + 2.0 * (alpha * u * w.conj()).re
}

fn label_phase(params: &SystemParams, t: f64, policy: PhasePolicy) -> Complex64 {
    match policy {
        PhasePolicy::Envelope => Complex64::new(1.0, 0.0),
        PhasePolicy::Full => {
            Complex64::new(0.0, -params.omega0 * UnitSystem::reduced_time(t)).exp()
        }
    }
}

/// Product state |α⟩ ⊗ |vacuum⟩ evolved to t: exciton label αu + w, field
/// labels αu_j + v_j, and the pure phase exp(i Im(A + Bα)).
pub fn evolve_product_state(
    params: &SystemParams,
    alpha: Complex64,
    grid: &BathGrid,
    t: f64,
    policy: PhasePolicy,
) -> BranchState {
    let phase = label_phase(params, t, policy);
    let u = coeff_u(params, t);
    let w = coeff_w(params, t);
    let a = coeff_a(params, t);
    let b = coeff_b(params, t);
    let field_labels = grid
        .mode_energies
        .iter()
        .zip(&grid.couplings)
        .map(|(&om, &k)| {
            (alpha * coeff_u_j(params, om, k, t) + coeff_v_j(params, om, k, t).value) * phase
        })
        .collect();
    BranchState {
        prefactor_phase: Complex64::new(0.0, (a + b * alpha).im).exp(),
        exciton_label: (alpha * u + w) * phase,
        field_labels,
    }
}

/// Both branches of an evolved cat.
pub fn evolve_cat_state(
    params: &SystemParams,
    cat: &CatSpec,
    grid: &BathGrid,
    t: f64,
    policy: PhasePolicy,
) -> (BranchState, BranchState) {
    (
        evolve_product_state(params, cat.alpha1, grid, t, policy),
        evolve_product_state(params, cat.alpha2, grid, t, policy),
    )
}

/// Real and imaginary parts of the exponent of F.
fn decoherence_exponent(u: Complex64, w: Complex64, a1: Complex64, a2: Complex64) -> (f64, f64) {
    let loss = 1.0 - u.norm_sqr();
    let overlap = a1.conj() * a2;
    let re = (-0.5 * a1.norm_sqr() - 0.5 * a2.norm_sqr() + overlap.re) * loss;
    // ½(z − z*) = i Im z
    let im = overlap.im * loss + ((a1 - a2) * u * w.conj()).im;
    (re, im)
}

/// F(t) = exp[(−½|α₁|² − ½|α₂|² + α₁*α₂)(1 − |u|²)] · exp[½(α₁ − α₂)uw* − c.c.],
/// the factor on the |branch 1⟩⟨branch 2| element of the exciton's reduced
/// density matrix.
pub fn decoherence_factor(
    params: &SystemParams,
    alpha1: Complex64,
    alpha2: Complex64,
    t: f64,
) -> Complex64 {
    let (re, im) = decoherence_exponent(coeff_u(params, t), coeff_w(params, t), alpha1, alpha2);
    Complex64::from_polar(re.exp(), im)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormForm {
    /// exp[−½D²(1 − |u|²)].
    #[default]
    Exact,
    /// exp[−2|α|² sin²(Δφ/2) Γt], the short-time law. Not accurate in
    /// general: 1 − |u|² starts as MΓt², not Γt.
    ShortTime,
}

/// |F| for the phase-shift cat (α, αe^{iΔφ}).
pub fn decoherence_norm(
    params: &SystemParams,
    alpha: Complex64,
    dphi: f64,
    t: f64,
    form: NormForm,
) -> f64 {
    let d = 2.0 * alpha.norm() * (0.5 * dphi).sin();
    match form {
        NormForm::Exact => (-0.5 * d * d * (1.0 - coeff_u(params, t).norm_sqr())).exp(),
        NormForm::ShortTime => {
            let s = (0.5 * dphi).sin();
            let x = UnitSystem::reduced_time(t);
            (-2.0 * alpha.norm_sqr() * s * s * params.gamma * x).exp()
        }
    }
}

/// τ_d = 1/(2|α|²Γ sin²(Δφ/2)) = 2τ_p/D², in fs.
pub fn decoherence_time(alpha: Complex64, dphi: f64, gamma: f64) -> Result<f64, ObservableError> {
    if !(gamma > 0.0) {
        return Err(ObservableError::Gamma(gamma));
    }
    let s = (0.5 * dphi).sin();
    let rate = 2.0 * alpha.norm_sqr() * gamma * s * s;
    if rate == 0.0 {
        return Err(ObservableError::NoDecoherence);
    }
    Ok(UnitSystem::lifetime_fs(rate))
}

/// D = |α₁ − α₂|.
pub fn cat_distance(alpha1: Complex64, alpha2: Complex64) -> f64 {
    (alpha1 - alpha2).norm()
}

/// φ(t) = Im{αuw* − c.c.} = 2 Im(αuw*), the phase of F for the cat
/// (α, −α).
pub fn phase_phi(params: &SystemParams, alpha: Complex64, t: f64) -> f64 {
    let u = coeff_u(params, t);
    let w = coeff_w(params, t);
    2.0 * (alpha * u * w.conj()).im
}

/// |α|² − [Σ_j|αu_j+v_j|² + |αu+w|² + 2Re(A + Bα)] with the closed forms
/// evaluated on `grid`. Vanishes as the grid converges to the continuum.
pub fn sum_rule_residual(params: &SystemParams, alpha: Complex64, grid: &BathGrid, t: f64) -> f64 {
    let fields: f64 = grid
        .mode_energies
        .iter()
        .zip(&grid.couplings)
        .map(|(&om, &k)| (alpha * coeff_u_j(params, om, k, t) + coeff_v_j(params, om, k, t).value).norm_sqr())
        .sum();
    let exciton = (alpha * coeff_u(params, t) + coeff_w(params, t)).norm_sqr();
    let vac = 2.0 * (coeff_a(params, t) + coeff_b(params, t) * alpha).re;
    alpha.norm_sqr() - (fields + exciton + vac)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecoherenceReport {
    /// fs
    pub t: f64,
    #[serde(serialize_with = "ser_complex")]
    pub f_complex: Complex64,
    /// |F|, computed from u alone.
    pub f_norm: f64,
    /// Unwrapped phase of F, rad.
    pub phi: f64,
    pub d_distance: f64,
    /// fs; `None` when the branches coincide.
    pub tau_d: Option<f64>,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

impl DecoherenceReport {
    pub fn new(params: &SystemParams, cat: &CatSpec, t: f64) -> Self {
        let (re, im) =
            decoherence_exponent(coeff_u(params, t), coeff_w(params, t), cat.alpha1, cat.alpha2);
        let f_norm = re.exp();
        let d = cat.distance();
        let tau_d = (d > 0.0).then(|| 2.0 * params.quasimode_lifetime_fs() / (d * d));
        Self {
            t,
            f_complex: Complex64::from_polar(f_norm, im),
            f_norm,
            phi: im,
            d_distance: d,
            tau_d,
        }
    }
}
