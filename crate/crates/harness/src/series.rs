//! CSV time series and kernel tables.
//!
//! Values are written in scientific notation with 17 significant digits,
//! one header row, `,` separators and `\n` line ends.

use std::fmt::Write as _;

use crate::error::{HarnessError, Result};

pub const LATTICE_COLUMNS: &[&str] = &[
    "t",
    "sup_abs",
    "global_mass",
    "global_energy",
    "local_mass",
    "local_energy",
    "sup_dt",
];
pub const LATTICE_LINEAR_COLUMNS: &[&str] = &["t", "sup_abs", "global_mass", "origin_abs"];
/// Followed by one `probe_<x0>` column per probe centre.
pub const CONTINUUM_COLUMNS: &[&str] = &["t", "sup_abs", "mass", "energy"];
pub const NLW_COLUMNS: &[&str] = &["t", "sup_abs", "energy"];
pub const NEWTON_COLUMNS: &[&str] = &["n", "eps_n", "sup_residual", "ratio"];
pub const KERNEL_COLUMNS: &[&str] = &["n", "re", "im"];

/// Header for a probe column; integral centres print without a fraction.
pub fn probe_column(x0: f64) -> String {
    if x0.fract() == 0.0 && x0.abs() < 1e15 {
        format!("probe_{}", x0 as i64)
    } else {
        format!("probe_{x0}")
    }
}

pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Column-named table of floats. Missing values are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.index_of(name).ok_or_else(|| {
            HarnessError::Input(format!("no column `{name}` in {:?}", self.columns))
        })?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                let _ = write!(s, "{}", format_value(*v));
            }
            s.push('\n');
        }
        s
    }
}

/// Parses a series written by [`TimeSeries::to_csv`].
///
/// The first column must be `t` or `n` and strictly increasing.
pub fn read_series(text: &str) -> Result<TimeSeries> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| HarnessError::Input("empty CSV".into()))?;
    let columns: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
    if columns.iter().any(|c| c.is_empty()) {
        return Err(HarnessError::Input("empty column name in header".into()));
    }
    if !matches!(columns[0].as_str(), "t" | "n") {
        return Err(HarnessError::Input(format!(
            "first column must be `t` or `n`, got `{}`",
            columns[0]
        )));
    }
    for (i, c) in columns.iter().enumerate() {
        if columns[..i].contains(c) {
            return Err(HarnessError::Input(format!("duplicate column `{c}`")));
        }
    }
    let mut series = TimeSeries::new(&columns);
    for (idx, line) in lines {
        let row = parse_row(line, idx + 1, columns.len())?;
        if !row[0].is_finite() {
            return Err(HarnessError::Input(format!(
                "line {}: non-finite {}",
                idx + 1,
                columns[0]
            )));
        }
        if let Some(prev) = series.rows.last() {
            if !(row[0] > prev[0]) {
                return Err(HarnessError::Input(format!(
                    "line {}: `{}` must be strictly increasing",
                    idx + 1,
                    columns[0]
                )));
            }
        }
        series.rows.push(row);
    }
    Ok(series)
}

fn parse_row(line: &str, lineno: usize, width: usize) -> Result<Vec<f64>> {
    let row: Vec<f64> = line
        .split(',')
        .map(|f| {
            f.trim().parse::<f64>().map_err(|_| {
                HarnessError::Input(format!("line {lineno}: bad number `{}`", f.trim()))
            })
        })
        .collect::<Result<_>>()?;
    if row.len() != width {
        return Err(HarnessError::Input(format!(
            "line {lineno}: expected {width} fields, got {}",
            row.len()
        )));
    }
    Ok(row)
}

/// Kernel samples `(n, K_n)` ordered by `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCsv {
    pub entries: Vec<(i64, f64, f64)>,
}

impl KernelCsv {
    pub fn to_csv(&self) -> String {
        let mut s = KERNEL_COLUMNS.join(",");
        s.push('\n');
        for (n, re, im) in &self.entries {
            let _ = writeln!(s, "{n},{},{}", format_value(*re), format_value(*im));
        }
        s
    }

    pub fn total_mass(&self) -> f64 {
        self.entries
            .iter()
            .map(|(_, re, im)| re * re + im * im)
            .sum()
    }
}

/// Parses an `n,re,im` table. Indices must be consecutive integers.
pub fn read_kernel(text: &str) -> Result<KernelCsv> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| HarnessError::Input("empty CSV".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != KERNEL_COLUMNS {
        return Err(HarnessError::Input(format!(
            "kernel header must be `n,re,im`, got `{header}`"
        )));
    }
    let mut entries: Vec<(i64, f64, f64)> = Vec::new();
    for (idx, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(HarnessError::Input(format!(
                "line {}: expected 3 fields, got {}",
                idx + 1,
                fields.len()
            )));
        }
        let n: i64 = fields[0].parse().map_err(|_| {
            HarnessError::Input(format!("line {}: bad index `{}`", idx + 1, fields[0]))
        })?;
        let mut val = [0.0; 2];
        for (v, f) in val.iter_mut().zip(&fields[1..]) {
            *v = f
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| HarnessError::Input(format!("line {}: bad value `{f}`", idx + 1)))?;
        }
        if let Some(&(prev, _, _)) = entries.last() {
            if prev.checked_add(1) != Some(n) {
                return Err(HarnessError::Input(format!(
                    "line {}: index {n} does not follow {prev}",
                    idx + 1
                )));
            }
        }
        entries.push((n, val[0], val[1]));
    }
    Ok(KernelCsv { entries })
}
