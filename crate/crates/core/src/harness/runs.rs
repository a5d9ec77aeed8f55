use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::config::ScenarioConfig;
use super::csv::CsvTable;
use super::HarnessError;
use crate::model::{coeff_a, coeff_b, coeff_u, coeff_w, steady_state_w};
use crate::observables::{
    decoherence_factor, mean_number_n0, phase_phi, CatSpec, DecoherenceReport,
};
use crate::oracle::{
    compare_runs, decoherence_from_run, fastest_rate, integrate_coefficient_odes,
    integrate_mode_equations, solve_volterra_u, AnalyticTrace, BathGrid, Channel,
    ComparisonReport, ModeChannel, OracleError, StepPlan, Tolerance,
};
use crate::params::{Fig2Variant, SystemParams};

/// Initial population used by every decoherence-phase panel.
pub const FIG2_N0: f64 = 10.0;
/// Most points accepted by a sweep.
pub const MAX_SWEEP_POINTS: usize = 10_000;

/// `samples + 1` evenly spaced values on [0, end].
fn linspace(end: f64, samples: usize) -> Vec<f64> {
    (0..=samples).map(|k| end * k as f64 / samples as f64).collect()
}

/// Times in units of 1/Γ for the population table: the main range plus the
/// dense short-time segment, merged and sorted.
fn fig1_times(config: &ScenarioConfig) -> Vec<f64> {
    let r = &config.run;
    let mut t = linspace(r.t_end, r.samples);
    t.extend(linspace(r.inset_t_end, r.inset_samples));
    t.sort_by(f64::total_cmp);
    t.dedup();
    t
}

/// Driven and undriven populations from the same initial coherent state.
pub fn run_fig1(config: &ScenarioConfig) -> Result<CsvTable, HarnessError> {
    let params = config.params();
    let undriven = params.with_xi(0.0);
    let (n0, theta) = config.population();
    let tau = params.quasimode_lifetime_fs();
    let mut table = CsvTable::new(["t_over_gamma_inv", "mean_n_driven", "mean_n_undriven"]);
    for x in fig1_times(config) {
        let t = x * tau;
        table.push(vec![
            x,
            mean_number_n0(&params, n0, theta, t),
            mean_number_n0(&undriven, n0, theta, t),
        ])?;
    }
    Ok(table)
}

/// Phase of the decoherence factor for the cat (α, −α), n̄₀ = 10, with the
/// panel's (δ, ξ) and ħΓ = ħM = 20 meV. Only Ω and the run block are taken
/// from the config.
pub fn run_fig2(config: &ScenarioConfig, variant: Fig2Variant) -> Result<CsvTable, HarnessError> {
    let alpha = Complex64::new(FIG2_N0.sqrt(), 0.0);
    let panel = |xi: f64| SystemParams {
        omega0: config.system.omega0,
        ..SystemParams::fig2_variant(variant, xi)
    };
    let columns: Vec<(&str, SystemParams)> = match variant {
        Fig2Variant::A => vec![("phi_xi5", panel(5.0)), ("phi_xi10", panel(10.0))],
        Fig2Variant::B | Fig2Variant::C => vec![("phi", panel(10.0))],
    };
    for (_, p) in &columns {
        p.validate()?;
    }
    let tau = columns[0].1.quasimode_lifetime_fs();
    let mut header = vec!["t_over_gamma_inv"];
    header.extend(columns.iter().map(|(n, _)| *n));
    let mut table = CsvTable::new(header);
    for x in linspace(config.run.t_end, config.run.samples) {
        let mut row = vec![x];
        row.extend(columns.iter().map(|(_, p)| phase_phi(p, alpha, x * tau)));
        table.push(row)?;
    }
    Ok(table)
}

/// Raw u, w, A, B along the main time range.
pub fn run_coeffs(config: &ScenarioConfig) -> Result<CsvTable, HarnessError> {
    let params = config.params();
    let tau = params.quasimode_lifetime_fs();
    let mut table = CsvTable::new([
        "t_over_gamma_inv",
        "u_re",
        "u_im",
        "w_re",
        "w_im",
        "a_re",
        "a_im",
        "b_re",
        "b_im",
    ]);
    for x in linspace(config.run.t_end, config.run.samples) {
        let t = x * tau;
        let (u, w, a, b) = (
            coeff_u(&params, t),
            coeff_w(&params, t),
            coeff_a(&params, t),
            coeff_b(&params, t),
        );
        table.push(vec![x, u.re, u.im, w.re, w.im, a.re, a.im, b.re, b.im])?;
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Xi,
    Delta,
    Gamma,
    MCoupling,
    N0,
    Dphi,
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "xi" => Ok(Self::Xi),
            "delta" => Ok(Self::Delta),
            "gamma" => Ok(Self::Gamma),
            "m_coupling" => Ok(Self::MCoupling),
            "n0" => Ok(Self::N0),
            "dphi" => Ok(Self::Dphi),
            other => Err(format!(
                "unknown sweep axis '{other}' (expected xi, delta, gamma, m_coupling, n0 or dphi)"
            )),
        }
    }
}

fn sweep_point(
    config: &ScenarioConfig,
    axis: SweepAxis,
    value: f64,
) -> Result<Vec<f64>, HarnessError> {
    let mut params = config.params();
    let mut alpha = config.alpha();
    let mut dphi = config.initial.dphi;
    match axis {
        SweepAxis::Xi => params.xi = value,
        SweepAxis::Delta => params.delta = value,
        SweepAxis::Gamma => params.gamma = value,
        SweepAxis::MCoupling => params.m_coupling = value,
        SweepAxis::N0 => {
            if !(value >= 0.0) {
                return Err(HarnessError::Usage(format!("n0 must be >= 0 (got {value})")));
            }
            alpha = Complex64::from_polar(value.sqrt(), alpha.arg());
        }
        SweepAxis::Dphi => dphi = value,
    }
    if !value.is_finite() {
        return Err(HarnessError::Usage(format!("sweep value {value} is not finite")));
    }
    params.validate()?;
    let i = &config.initial;
    let cat = CatSpec::phase_shift(
        alpha,
        dphi,
        Complex64::new(i.c1_re, i.c1_im),
        Complex64::new(i.c2_re, i.c2_im),
    )
    .map_err(|e| HarnessError::Usage(e.to_string()))?;
    let probe = config.run.probe_t * params.quasimode_lifetime_fs();
    let report = DecoherenceReport::new(&params, &cat, probe);
    let d = report.d_distance;
    let (tau_d, finite) = match report.tau_d {
        Some(t) if t.is_finite() => (t, 1.0),
        _ => (0.0, 0.0),
    };
    Ok(vec![
        value,
        tau_d,
        finite,
        (-0.5 * d * d).exp(),
        steady_state_w(&params).norm_sqr(),
        report.phi,
    ])
}

/// One row per value: τ_d (fs, 0 with tau_d_finite = 0 when the branches
/// coincide), |F| at long times, steady population |w∞|², and the phase
/// of F at the probe time.
pub fn run_sweep(
    config: &ScenarioConfig,
    axis: SweepAxis,
    values: &[f64],
) -> Result<CsvTable, HarnessError> {
    if values.len() > MAX_SWEEP_POINTS {
        return Err(HarnessError::Usage(format!(
            "{} sweep points, at most {MAX_SWEEP_POINTS} allowed",
            values.len()
        )));
    }
    let rows: Vec<Vec<f64>> = values
        .par_iter()
        .map(|&v| sweep_point(config, axis, v))
        .collect::<Result<_, _>>()?;
    let mut table = CsvTable::new(["value", "tau_d_fs", "tau_d_finite", "f_inf", "steady_n", "phi_probe"]);
    for row in rows {
        table.push(row)?;
    }
    Ok(table)
}

/// Outcome of the cross-validation battery.
#[derive(Debug, Clone, PartialEq)]
pub struct Validation {
    pub reports: Vec<ComparisonReport>,
}

impl Validation {
    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    /// "label: channel" for every failing channel.
    pub fn failures(&self) -> Vec<String> {
        self.reports
            .iter()
            .flat_map(|r| {
                r.failing_channels()
                    .into_iter()
                    .map(move |c| format!("{}: {c}", r.label))
            })
            .collect()
    }

    /// One JSON object per report, newline-terminated.
    pub fn to_jsonl(&self) -> String {
        self.reports
            .iter()
            .map(|r| serde_json::to_string(r).expect("report serializes") + "\n")
            .collect()
    }

    /// Flat text summary: one line per channel.
    pub fn summary_csv(&self) -> String {
        let mut s =
            String::from("label,channel,max_abs_error,max_rel_error,tolerance_kind,tolerance,pass\n");
        for r in &self.reports {
            for c in &r.channels {
                let (kind, tol) = match c.tolerance {
                    Tolerance::Abs(t) => ("abs", t),
                    Tolerance::Rel(t) => ("rel", t),
                };
                s.push_str(&format!(
                    "{},{},{},{},{kind},{},{}\n",
                    r.label,
                    c.channel,
                    super::csv::format_g12(c.max_abs_error),
                    super::csv::format_g12(c.max_rel_error),
                    super::csv::format_g12(tol),
                    u8::from(c.pass)
                ));
            }
        }
        s
    }
}

enum Check {
    Volterra,
    ModesU,
    ModesW,
    CoefficientOdes,
    Decoherence,
}

fn grid_plan(config: &ScenarioConfig, params: &SystemParams, grid: &BathGrid, t_end_gammas: f64) -> Result<StepPlan, OracleError> {
    StepPlan::from_rule(
        t_end_gammas * params.quasimode_lifetime_fs(),
        fastest_rate(params, Some(grid.window)),
        config.run.dt_rule,
        config.run.samples,
    )
}

fn with_truncation(mut r: ComparisonReport, params: &SystemParams, grid: &BathGrid) -> ComparisonReport {
    r.kernel_truncation = Some(grid.kernel_truncation(params));
    r
}

fn run_check(config: &ScenarioConfig, check: Check) -> Result<Vec<ComparisonReport>, OracleError> {
    let params = config.params();
    let v = &config.validate;
    let grid_tol = Tolerance::Abs(v.tol_grid);
    match check {
        Check::Volterra => {
            let plan = StepPlan::from_rule(
                v.volterra_t_end * params.quasimode_lifetime_fs(),
                fastest_rate(&params, None),
                config.run.dt_rule,
                config.run.samples,
            )?;
            let run = solve_volterra_u(&params, &plan)?;
            let trace = AnalyticTrace::sample(&params, None, &run.times, &[Channel::U]);
            let rep = compare_runs("volterra", &trace, &run, &[(Channel::U, Tolerance::Abs(v.tol_volterra))])?;
            Ok(vec![rep])
        }
        Check::ModesU | Check::ModesW => {
            let grid = config.grid(&params)?;
            let plan = grid_plan(config, &params, &grid, v.grid_t_end)?;
            let c = grid.center_index();
            let (label, mode, channels) = match check {
                Check::ModesU => ("mode_equations_u", ModeChannel::CoefficientU, [Channel::U, Channel::Uj(c)]),
                _ => ("mode_equations_w", ModeChannel::CoefficientW, [Channel::W, Channel::Vj(c)]),
            };
            let run = integrate_mode_equations(&params, &grid, mode, &plan)?;
            let trace = AnalyticTrace::sample(&params, Some(&grid), &run.times, &channels);
            let tols: Vec<_> = channels.iter().map(|&ch| (ch, grid_tol)).collect();
            let rep = compare_runs(label, &trace, &run, &tols)?;
            Ok(vec![with_truncation(rep, &params, &grid)])
        }
        Check::CoefficientOdes => {
            let grid = config.grid(&params)?;
            let plan = grid_plan(config, &params, &grid, v.grid_t_end)?;
            let c = grid.center_index();
            let channels = [
                Channel::U,
                Channel::W,
                Channel::A,
                Channel::B,
                Channel::Uj(c),
                Channel::Vj(c),
            ];
            let run = integrate_coefficient_odes(&params, &grid, &plan)?;
            let trace = AnalyticTrace::sample(&params, Some(&grid), &run.times, &channels);
            let tols: Vec<_> = channels.iter().map(|&ch| (ch, grid_tol)).collect();
            let rep = compare_runs("coefficient_odes", &trace, &run, &tols)?;

            let alpha = config.alpha();
            let residuals: Vec<f64> = (0..run.len())
                .map(|k| run.sum_rule_residual(k, alpha).expect("coefficient-ODE run"))
                .collect();
            // Relative to |α|²; a vacuum start is measured in absolute terms.
            let scale = alpha.norm_sqr().max(1.0);
            let sum = ComparisonReport::scalar(
                "sum_rule",
                &run.times,
                run.step_size,
                Some(grid.meta()),
                "norm_residual",
                &residuals,
                scale,
                Tolerance::Rel(v.tol_sum_rule),
            );
            Ok(vec![
                with_truncation(rep, &params, &grid),
                with_truncation(sum, &params, &grid),
            ])
        }
        Check::Decoherence => {
            let grid = config.grid(&params)?;
            let plan = grid_plan(config, &params, &grid, v.decoherence_t_end)?;
            let cat = config.cat();
            let run = integrate_coefficient_odes(&params, &grid, &plan)?;
            let oracle = decoherence_from_run(&run, &cat)?;
            let errors: Vec<f64> = run
                .times
                .iter()
                .zip(&oracle)
                .map(|(&t, f)| (decoherence_factor(&params, cat.alpha1, cat.alpha2, t) - f).norm())
                .collect();
            let rep = ComparisonReport::scalar(
                "decoherence",
                &run.times,
                run.step_size,
                Some(grid.meta()),
                "F",
                &errors,
                1.0,
                Tolerance::Abs(v.tol_decoherence),
            );
            Ok(vec![with_truncation(rep, &params, &grid)])
        }
    }
}

/// Cross-validation battery: u against the memory-kernel solver; u, w,
/// u_j, v_j against the coherent-label equations; all coefficients against
/// the coefficient equations; the norm sum rule along that path; and the
/// decoherence factor against the branch-overlap product. Checks run in
/// parallel; reports come back in a fixed order.
pub fn run_validate(config: &ScenarioConfig) -> Result<Validation, HarnessError> {
    let checks = vec![
        Check::Volterra,
        Check::ModesU,
        Check::ModesW,
        Check::CoefficientOdes,
        Check::Decoherence,
    ];
    let results: Vec<Result<Vec<ComparisonReport>, OracleError>> =
        checks.into_par_iter().map(|c| run_check(config, c)).collect();
    let mut reports = Vec::new();
    for r in results {
        reports.extend(r?);
    }
    Ok(Validation { reports })
}
