//! Scenario configuration files.
//!
//! A config is plain `[section]` / `key = value` text. Every section and
//! every key is optional; missing ones take the defaults below, which
//! reproduce the population figure (ħΓ = 0.05 meV, ħM = 20 meV,
//! ħξ = 10 meV, ħδ = 0.1 meV, n̄₀ = 10). Unknown keys are rejected.
//!
//! ```text
//! [system]            # meV
//! omega0 = 1500.0
//! gamma = 0.05
//! m_coupling = 20.0
//! xi = 10.0
//! delta = 0.1
//!
//! [initial]
//! n0 = 10.0           # or alpha_re / alpha_im, not both
//! dphi = 3.141592653589793
//! c1_re = 1.0         # c1_im, c2_re, c2_im likewise
//!
//! [grid]
//! j_count = 4001
//! window_mult = 50.0  # W in units of Γ
//!
//! [run]               # times in units of 1/Γ
//! t_end = 5.0
//! samples = 200
//! dt_rule = 0.01      # dt <= dt_rule · ħ / fastest rate
//! inset_t_end = 0.5
//! inset_samples = 200
//! probe_t = 1.0
//!
//! [validate]
//! volterra_t_end = 10.0
//! grid_t_end = 5.0
//! decoherence_t_end = 2.0
//! tol_volterra = 1e-6
//! tol_grid = 5e-3
//! tol_decoherence = 1e-3
//! tol_sum_rule = 1e-3 # relative to |α|²
//!
//! [output]
//! dir = "out"
//! plot = true
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::observables::CatSpec;
use crate::oracle::{
    BathGrid, OracleError, DEFAULT_MODES, DEFAULT_WINDOW_GAMMAS, MAX_STEPS,
    STEP_RULE,
};
use crate::params::{ParamError, SystemParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("config parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("config field {field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemSection {
    pub omega0: f64,
    pub gamma: f64,
    pub m_coupling: f64,
    pub xi: f64,
    pub delta: f64,
}

impl Default for SystemSection {
    fn default() -> Self {
        let p = SystemParams::fig1();
        Self {
            omega0: p.omega0,
            gamma: p.gamma,
            m_coupling: p.m_coupling,
            xi: p.xi,
            delta: p.delta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_im: Option<f64>,
    pub dphi: f64,
    pub c1_re: f64,
    pub c1_im: f64,
    pub c2_re: f64,
    pub c2_im: f64,
}

/// Initial population when neither n0 nor α is given.
pub const DEFAULT_N0: f64 = 10.0;

impl Default for InitialSection {
    fn default() -> Self {
        Self {
            n0: None,
            alpha_re: None,
            alpha_im: None,
            dphi: std::f64::consts::PI,
            c1_re: 1.0,
            c1_im: 0.0,
            c2_re: 1.0,
            c2_im: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub j_count: usize,
    pub window_mult: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            j_count: DEFAULT_MODES,
            window_mult: DEFAULT_WINDOW_GAMMAS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub t_end: f64,
    pub samples: usize,
    pub dt_rule: f64,
    pub inset_t_end: f64,
    pub inset_samples: usize,
    pub probe_t: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            t_end: 5.0,
            samples: 200,
            dt_rule: STEP_RULE,
            inset_t_end: 0.5,
            inset_samples: 200,
            probe_t: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateSection {
    pub volterra_t_end: f64,
    pub grid_t_end: f64,
    pub decoherence_t_end: f64,
    pub tol_volterra: f64,
    pub tol_grid: f64,
    pub tol_decoherence: f64,
    pub tol_sum_rule: f64,
}

impl Default for ValidateSection {
    fn default() -> Self {
        Self {
            volterra_t_end: 10.0,
            grid_t_end: 5.0,
            decoherence_t_end: 2.0,
            tol_volterra: 1e-6,
            tol_grid: 5e-3,
            tol_decoherence: 1e-3,
            tol_sum_rule: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
    pub plot: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: "out".into(),
            plot: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub system: SystemSection,
    pub initial: InitialSection,
    pub grid: GridSection,
    pub run: RunSection,
    pub validate: ValidateSection,
    pub output: OutputSection,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parse and validate a config. Defaults fill anything left out.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let config: ScenarioConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

/// Canonical text form; `parse_config(&serialize_config(c)) == c`.
pub fn serialize_config(config: &ScenarioConfig) -> String {
    toml::to_string(config).expect("config is always representable")
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be finite and > 0 (got {v})")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be finite and >= 0 (got {v})")))
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let params = self.params();
        params.validate().map_err(|e| {
            let field = match e {
                ParamError::Gamma(_) => "system.gamma",
                ParamError::Coupling(_) => "system.m_coupling",
                ParamError::Drive(_) => "system.xi",
                ParamError::Detuning(_) => "system.delta",
                ParamError::Transition(_) => "system.omega0",
            };
            invalid(field, format!("SystemParams invariant violated: {e}"))
        })?;

        let i = &self.initial;
        let has_alpha = i.alpha_re.is_some() || i.alpha_im.is_some();
        if has_alpha && i.n0.is_some() {
            return Err(invalid("initial", "give either n0 or alpha_re/alpha_im, not both"));
        }
        if let Some(n0) = i.n0 {
            non_negative("initial.n0", n0)?;
        }
        for (f, v) in [
            ("initial.alpha_re", i.alpha_re.unwrap_or(0.0)),
            ("initial.alpha_im", i.alpha_im.unwrap_or(0.0)),
            ("initial.dphi", i.dphi),
            ("initial.c1_re", i.c1_re),
            ("initial.c1_im", i.c1_im),
            ("initial.c2_re", i.c2_re),
            ("initial.c2_im", i.c2_im),
        ] {
            if !v.is_finite() {
                return Err(invalid(f, "must be finite"));
            }
        }
        if i.c1_re == 0.0 && i.c1_im == 0.0 && i.c2_re == 0.0 && i.c2_im == 0.0 {
            return Err(invalid("initial", "cat weights c1 and c2 are both zero"));
        }

        self.grid(&params).map_err(|e| {
            let field = match e {
                OracleError::ModeCount(_) => "grid.j_count",
                _ => "grid.window_mult",
            };
            invalid(field, format!("BathGrid invariant violated: {e}"))
        })?;
        if self.grid.j_count > 1_000_001 {
            return Err(invalid("grid.j_count", "at most 1000001 modes"));
        }

        let r = &self.run;
        positive("run.t_end", r.t_end)?;
        positive("run.inset_t_end", r.inset_t_end)?;
        non_negative("run.probe_t", r.probe_t)?;
        for (f, n) in [("run.samples", r.samples), ("run.inset_samples", r.inset_samples)] {
            if n == 0 || n > MAX_STEPS {
                return Err(invalid(f, format!("must be in 1..={MAX_STEPS} (got {n})")));
            }
        }
        if !(r.dt_rule > 0.0 && r.dt_rule <= STEP_RULE) {
            return Err(invalid(
                "run.dt_rule",
                format!("must be in (0, {STEP_RULE}] (got {})", r.dt_rule),
            ));
        }

        let v = &self.validate;
        positive("validate.volterra_t_end", v.volterra_t_end)?;
        positive("validate.grid_t_end", v.grid_t_end)?;
        positive("validate.decoherence_t_end", v.decoherence_t_end)?;
        non_negative("validate.tol_volterra", v.tol_volterra)?;
        non_negative("validate.tol_grid", v.tol_grid)?;
        non_negative("validate.tol_decoherence", v.tol_decoherence)?;
        non_negative("validate.tol_sum_rule", v.tol_sum_rule)?;

        if self.output.dir.is_empty() {
            return Err(invalid("output.dir", "must not be empty"));
        }
        Ok(())
    }

    pub fn params(&self) -> SystemParams {
        let s = &self.system;
        SystemParams {
            omega0: s.omega0,
            gamma: s.gamma,
            m_coupling: s.m_coupling,
            xi: s.xi,
            delta: s.delta,
        }
    }

    /// α from alpha_re/alpha_im, else √n0 (real, positive).
    pub fn alpha(&self) -> Complex64 {
        let i = &self.initial;
        if i.alpha_re.is_some() || i.alpha_im.is_some() {
            Complex64::new(i.alpha_re.unwrap_or(0.0), i.alpha_im.unwrap_or(0.0))
        } else {
            Complex64::new(i.n0.unwrap_or(DEFAULT_N0).sqrt(), 0.0)
        }
    }

    /// (n̄₀, arg α) as given: n0 is kept verbatim rather than rebuilt
    /// from |α|².
    pub fn population(&self) -> (f64, f64) {
        let i = &self.initial;
        if i.alpha_re.is_some() || i.alpha_im.is_some() {
            let a = self.alpha();
            (a.norm_sqr(), a.arg())
        } else {
            (i.n0.unwrap_or(DEFAULT_N0), 0.0)
        }
    }

    pub fn cat(&self) -> CatSpec {
        let i = &self.initial;
        CatSpec::phase_shift(
            self.alpha(),
            i.dphi,
            Complex64::new(i.c1_re, i.c1_im),
            Complex64::new(i.c2_re, i.c2_im),
        )
        .expect("weights checked by validate")
    }

    pub fn grid(&self, params: &SystemParams) -> Result<BathGrid, OracleError> {
        BathGrid::with_multiplier(params, self.grid.j_count, self.grid.window_mult)
    }

    /// Apply command-line overrides and re-validate.
    pub fn with_overrides(
        mut self,
        grid_j: Option<usize>,
        grid_w_mult: Option<f64>,
        dt_rule: Option<f64>,
        out_dir: Option<&str>,
    ) -> Result<Self, ConfigError> {
        if let Some(j) = grid_j {
            self.grid.j_count = j;
        }
        if let Some(w) = grid_w_mult {
            self.grid.window_mult = w;
        }
        if let Some(r) = dt_rule {
            self.run.dt_rule = r;
        }
        if let Some(d) = out_dir {
            self.output.dir = d.to_string();
        }
        self.validate()?;
        Ok(self)
    }
}
