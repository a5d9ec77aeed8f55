//! Scenario configs, figure and sweep tables, the validation battery and
//! file output. The `driven-exciton` binary is a thin wrapper over this.

mod config;
mod csv;
mod runs;

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use config::{
    parse_config, serialize_config, ConfigError, GridSection, InitialSection, OutputSection,
    RunSection, ScenarioConfig, SystemSection, ValidateSection, DEFAULT_N0,
};
pub use csv::{emit_csv, emit_plot_script, format_g12, plot_script, CsvTable, TableError};
pub use runs::{
    run_coeffs, run_fig1, run_fig2, run_sweep, run_validate, SweepAxis, Validation, FIG2_N0,
    MAX_SWEEP_POINTS,
};

use crate::oracle::OracleError;
use crate::params::ParamError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("{0}")]
    Usage(String),
}

/// Read and parse a config file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| TableError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_config(&text)?)
}

fn ensure_dir(dir: &Path) -> Result<(), TableError> {
    fs::create_dir_all(dir).map_err(|source| TableError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Write `<stem>.csv` into `dir`, plus `<stem>.gp` when `plot` is set.
/// Returns the written paths.
pub fn write_table(
    dir: &Path,
    stem: &str,
    table: &CsvTable,
    plot: bool,
) -> Result<Vec<PathBuf>, TableError> {
    ensure_dir(dir)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    emit_csv(table, &csv_path)?;
    let mut written = vec![csv_path.clone()];
    if plot {
        let gp = dir.join(format!("{stem}.gp"));
        emit_plot_script(table, &csv_path, &gp)?;
        written.push(gp);
    }
    Ok(written)
}

/// Write `validate.jsonl` and `validate_summary.csv` into `dir`.
pub fn write_validation(dir: &Path, v: &Validation) -> Result<Vec<PathBuf>, TableError> {
    ensure_dir(dir)?;
    let mut written = Vec::new();
    for (name, text) in [
        ("validate.jsonl", v.to_jsonl()),
        ("validate_summary.csv", v.summary_csv()),
    ] {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|source| TableError::Io {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}
