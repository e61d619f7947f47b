//! Run directories: CSV series, metadata sidecar and plots.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::engine::{execute, EngineOutput};
use crate::error::{HarnessError, Result};
use crate::plot::{to_dat, to_svg};

pub const SERIES_FILE: &str = "series.csv";
pub const META_FILE: &str = "meta.json";
pub const SVG_FILE: &str = "plot.svg";
pub const DAT_FILE: &str = "plot.dat";

#[derive(Debug, Clone, Serialize)]
pub struct RunMeta {
    pub engine: String,
    pub version: String,
    pub config: Vec<(String, String)>,
    pub rows: usize,
    pub columns: Vec<String>,
    pub wall_time_s: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub output: EngineOutput,
    pub meta: RunMeta,
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| HarnessError::io(path, e))
}

/// Writes the series, sidecar and (if enabled) plots of a finished run.
pub fn write_run(
    dir: &Path,
    cfg: &ExperimentConfig,
    output: &EngineOutput,
    wall_time_s: f64,
) -> Result<RunMeta> {
    create_dir(dir)?;
    write_file(&dir.join(SERIES_FILE), &output.series.to_csv())?;
    if cfg.output.plot {
        let cols: Vec<&str> = output.plot_columns.iter().map(String::as_str).collect();
        let title = format!("{} run", cfg.engine.name());
        write_file(
            &dir.join(SVG_FILE),
            &to_svg(&output.series, &cols, &title, cfg.output.loglog),
        )?;
        write_file(&dir.join(DAT_FILE), &to_dat(&output.series))?;
    }
    let meta = RunMeta {
        engine: cfg.engine.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.pairs(),
        rows: output.series.len(),
        columns: output.series.columns.clone(),
        wall_time_s,
        warnings: output.warnings.clone(),
    };
    let json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    write_file(&dir.join(META_FILE), &(json + "\n"))?;
    Ok(meta)
}

/// Executes `cfg` and writes its run directory. `out` overrides `cfg.out`.
pub fn run_experiment(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<RunOutcome> {
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs").join(cfg.engine.name()));
    let start = Instant::now();
    let output = execute(cfg)?;
    let meta = write_run(&dir, cfg, &output, start.elapsed().as_secs_f64())?;
    Ok(RunOutcome { dir, output, meta })
}
