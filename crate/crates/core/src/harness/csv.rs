//! Rectangular numeric tables and their CSV / gnuplot emission.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("row {row} has {got} values, header has {want}")]
    Ragged { row: usize, got: usize, want: usize },
    #[error("non-finite value {value} in column {column}, row {row}")]
    NonFinite { row: usize, column: String, value: f64 },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

/// Header plus rows of finite numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<(), TableError> {
        if row.len() != self.header.len() {
            return Err(TableError::Ragged {
                row: self.rows.len(),
                got: row.len(),
                want: self.header.len(),
            });
        }
        if let Some((k, &v)) = row.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(TableError::NonFinite {
                row: self.rows.len(),
                column: self.header[k].clone(),
                value: v,
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_g12(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// 12 significant digits, shortest of fixed or exponent notation, trailing
/// zeros trimmed (C's `%.12g`).
pub fn format_g12(v: f64) -> String {
    const DIGITS: i32 = 12;
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= DIGITS {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn write(path: &Path, text: &str) -> Result<(), TableError> {
    fs::write(path, text).map_err(|source| TableError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn emit_csv(table: &CsvTable, path: &Path) -> Result<(), TableError> {
    write(path, &table.to_csv_string())
}

/// gnuplot commands plotting every column against the first. The data file
/// is referenced by its name relative to the script, so the pair can be
/// moved together.
pub fn plot_script(table: &CsvTable, csv_name: &str) -> String {
    let x = table.header.first().map(String::as_str).unwrap_or("x");
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str(&format!("set xlabel '{x}'\n"));
    s.push_str("set terminal pngcairo size 900,600\n");
    let stem = csv_name.strip_suffix(".csv").unwrap_or(csv_name);
    s.push_str(&format!("set output '{stem}.png'\n"));
    let curves: Vec<String> = (2..=table.header.len())
        .map(|k| format!("'{csv_name}' using 1:{k} with lines"))
        .collect();
    if !curves.is_empty() {
        s.push_str("plot ");
        s.push_str(&curves.join(", \\\n     "));
        s.push('\n');
    }
    s
}

/// Write the plot script at `path` for a CSV sitting next to it.
pub fn emit_plot_script(table: &CsvTable, csv_path: &Path, path: &Path) -> Result<(), TableError> {
    let csv_name = csv_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    write(path, &plot_script(table, &csv_name))
}
