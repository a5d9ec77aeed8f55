use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use super::{BathGrid, GridMeta, OracleError, OracleRun};
use crate::model::{coeff_a, coeff_b, coeff_u, coeff_u_j, coeff_v_j, coeff_w};
use crate::params::SystemParams;

/// A comparable coefficient; mode channels carry the grid index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    U,
    W,
    A,
    B,
    Uj(usize),
    Vj(usize),
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Channel::U => write!(f, "u"),
            Channel::W => write!(f, "w"),
            Channel::A => write!(f, "A"),
            Channel::B => write!(f, "B"),
            Channel::Uj(j) => write!(f, "u_j[{j}]"),
            Channel::Vj(j) => write!(f, "v_j[{j}]"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Tolerance {
    /// Bound on max |analytic − oracle|.
    Abs(f64),
    /// Bound on max |analytic − oracle| / max |oracle|.
    Rel(f64),
}

/// Closed-form values sampled on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticTrace {
    pub times: Vec<f64>,
    pub channels: Vec<(Channel, Vec<Complex64>)>,
}

impl AnalyticTrace {
    /// Evaluate the requested channels at `times` (fs). Mode channels need
    /// the grid to look up ω_j and κ_j.
    pub fn sample(
        params: &SystemParams,
        grid: Option<&BathGrid>,
        times: &[f64],
        channels: &[Channel],
    ) -> Self {
        let series = channels
            .iter()
            .map(|&ch| {
                let values = times
                    .iter()
                    .map(|&t| match ch {
                        Channel::U => coeff_u(params, t),
                        Channel::W => coeff_w(params, t),
                        Channel::A => coeff_a(params, t),
                        Channel::B => coeff_b(params, t),
                        Channel::Uj(j) => {
                            let g = grid.expect("mode channel needs a grid");
                            coeff_u_j(params, g.mode_energies[j], g.couplings[j], t)
                        }
                        Channel::Vj(j) => {
                            let g = grid.expect("mode channel needs a grid");
                            coeff_v_j(params, g.mode_energies[j], g.couplings[j], t).value
                        }
                    })
                    .collect();
                (ch, values)
            })
            .collect();
        Self {
            times: times.to_vec(),
            channels: series,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelError {
    pub channel: String,
    pub max_abs_error: f64,
    /// Max abs error over the peak oracle magnitude.
    pub max_rel_error: f64,
    pub tolerance: Tolerance,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub label: String,
    pub t_start_fs: f64,
    pub t_end_fs: f64,
    pub step_size_fs: f64,
    pub grid: Option<GridMeta>,
    /// MΓ − Σκ_j² for grid runs (meV²).
    pub kernel_truncation: Option<f64>,
    pub channels: Vec<ChannelError>,
    pub pass: bool,
}

impl ComparisonReport {
    /// Report for a quantity compared outside [`compare_runs`] (scalar
    /// diagnostics such as sum-rule residuals or decoherence factors).
    pub fn scalar(
        label: &str,
        times: &[f64],
        step_size_fs: f64,
        grid: Option<GridMeta>,
        name: &str,
        errors: &[f64],
        scale: f64,
        tolerance: Tolerance,
    ) -> Self {
        let max_abs = errors.iter().fold(0.0f64, |a, &e| a.max(e.abs()));
        let err = channel_error(name.to_string(), max_abs, scale, tolerance);
        let pass = err.pass;
        Self {
            label: label.to_string(),
            t_start_fs: times.first().copied().unwrap_or(0.0),
            t_end_fs: times.last().copied().unwrap_or(0.0),
            step_size_fs,
            grid,
            kernel_truncation: None,
            channels: vec![err],
            pass,
        }
    }

    pub fn failing_channels(&self) -> Vec<&str> {
        self.channels
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.channel.as_str())
            .collect()
    }
}

fn channel_error(channel: String, max_abs: f64, scale: f64, tolerance: Tolerance) -> ChannelError {
    let max_rel = if scale > 0.0 {
        max_abs / scale
    } else if max_abs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    let pass = match tolerance {
        Tolerance::Abs(tol) => max_abs <= tol,
        Tolerance::Rel(tol) => max_rel <= tol,
    } && max_abs.is_finite();
    ChannelError {
        channel,
        max_abs_error: max_abs,
        max_rel_error: max_rel,
        tolerance,
        pass,
    }
}

fn oracle_channel(run: &OracleRun, ch: Channel) -> Result<Vec<Complex64>, OracleError> {
    let missing = || OracleError::MissingChannel(ch.to_string());
    let direct = |path: &Vec<Complex64>| {
        if path.len() == run.len() {
            Ok(path.clone())
        } else {
            Err(missing())
        }
    };
    let modal = |path: &Vec<Vec<Complex64>>, j: usize| {
        if path.len() != run.len() || path.first().map_or(true, |row| j >= row.len()) {
            return Err(missing());
        }
        Ok(path.iter().map(|row| row[j]).collect())
    };
    match ch {
        Channel::U => direct(&run.u_path),
        Channel::W => direct(&run.w_path),
        Channel::A => direct(&run.a_path),
        Channel::B => direct(&run.b_path),
        Channel::Uj(j) => modal(&run.uj_path, j),
        Channel::Vj(j) => modal(&run.vj_path, j),
    }
}

/// Per-channel max abs / rel errors of `analytic` against `oracle` with a
/// pass flag per channel and overall. Time grids must coincide.
pub fn compare_runs(
    label: &str,
    analytic: &AnalyticTrace,
    oracle: &OracleRun,
    tolerances: &[(Channel, Tolerance)],
) -> Result<ComparisonReport, OracleError> {
    if analytic.times.len() != oracle.times.len() {
        return Err(OracleError::Misaligned(format!(
            "{} analytic samples vs {} oracle samples",
            analytic.times.len(),
            oracle.times.len()
        )));
    }
    for (k, (ta, to)) in analytic.times.iter().zip(&oracle.times).enumerate() {
        if (ta - to).abs() > 1e-9 * ta.abs().max(to.abs()).max(1.0) {
            return Err(OracleError::Misaligned(format!(
                "sample {k}: analytic t = {ta} fs, oracle t = {to} fs"
            )));
        }
    }
    let mut channels = Vec::with_capacity(tolerances.len());
    for &(ch, tol) in tolerances {
        let reference = oracle_channel(oracle, ch)?;
        let values = analytic
            .channels
            .iter()
            .find(|(c, _)| *c == ch)
            .map(|(_, v)| v)
            .ok_or_else(|| OracleError::MissingChannel(format!("analytic {ch}")))?;
        let max_abs = values
            .iter()
            .zip(&reference)
            .fold(0.0f64, |m, (a, o)| m.max((a - o).norm()));
        let scale = reference.iter().fold(0.0f64, |m, o| m.max(o.norm()));
        channels.push(channel_error(ch.to_string(), max_abs, scale, tol));
    }
    let pass = channels.iter().all(|c| c.pass);
    Ok(ComparisonReport {
        label: label.to_string(),
        t_start_fs: oracle.times.first().copied().unwrap_or(0.0),
        t_end_fs: oracle.times.last().copied().unwrap_or(0.0),
        step_size_fs: oracle.step_size,
        grid: oracle.grid,
        kernel_truncation: None,
        channels,
        pass,
    })
}
