//! Parameter sweeps over weight radius, centre, horizon and seed.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::config::{Engine, ExperimentConfig};
use crate::engine::{execute, EngineOutput};
use crate::error::{HarnessError, Result};
use crate::run::{create_dir, write_file, write_run};
use crate::series::format_value;

pub const SUMMARY_FILE: &str = "summary.csv";

/// One point of the sweep grid. Unset coordinates keep the base config.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub index: usize,
    pub r: Option<f64>,
    pub x0: Option<i64>,
    pub t0: Option<f64>,
    pub seed: Option<u64>,
}

impl SweepPoint {
    pub fn label(&self) -> String {
        let mut s = format!("point_{:04}", self.index);
        if let Some(r) = self.r {
            let _ = write!(s, "_r{r}");
        }
        if let Some(x) = self.x0 {
            let _ = write!(s, "_x{x}");
        }
        if let Some(t) = self.t0 {
            let _ = write!(s, "_t{t}");
        }
        if let Some(seed) = self.seed {
            let _ = write!(s, "_s{seed}");
        }
        s
    }

    /// The base config with this point's coordinates substituted.
    pub fn apply(&self, base: &ExperimentConfig) -> ExperimentConfig {
        let mut cfg = base.clone();
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        match cfg.engine {
            Engine::Lattice => {
                let w = cfg.weight.as_mut().expect("lattice weight");
                if let Some(r) = self.r {
                    w.r = r;
                }
                if let Some(x0) = self.x0 {
                    w.x0 = x0;
                }
                if let Some(t0) = self.t0 {
                    w.t0 = Some(t0);
                }
            }
            Engine::Continuum => {
                let c = cfg.continuum.as_mut().expect("continuum section");
                if let Some(r) = self.r {
                    c.probe_r = r;
                }
                if let Some(x0) = self.x0 {
                    c.probes = vec![x0 as f64];
                }
            }
            _ => {}
        }
        cfg.sweep = Default::default();
        cfg
    }
}

fn axis<T: Copy>(v: &[T]) -> Vec<Option<T>> {
    if v.is_empty() {
        vec![None]
    } else {
        v.iter().copied().map(Some).collect()
    }
}

/// Cartesian product of the sweep lists in `r, x0, t0, seed` order.
pub fn sweep_points(cfg: &ExperimentConfig) -> Vec<SweepPoint> {
    let s = &cfg.sweep;
    let mut out = Vec::new();
    for r in axis(&s.r) {
        for x0 in axis(&s.x0) {
            for t0 in axis(&s.t0) {
                for seed in axis(&s.seed) {
                    out.push(SweepPoint {
                        index: out.len(),
                        r,
                        x0,
                        t0,
                        seed,
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct PointResult {
    pub point: SweepPoint,
    pub config: ExperimentConfig,
    pub output: EngineOutput,
    pub wall_time_s: f64,
}

/// Runs every point on a pool of `workers` threads; results come back in
/// point order whatever the scheduling.
pub fn run_sweep(cfg: &ExperimentConfig, workers: usize) -> Result<Vec<PointResult>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Input(format!("thread pool: {e}")))?;
    let points = sweep_points(cfg);
    let mut results: Vec<PointResult> = pool.install(|| {
        points
            .par_iter()
            .map(|p| {
                let config = p.apply(cfg);
                let start = Instant::now();
                let output = execute(&config)?;
                Ok(PointResult {
                    point: *p,
                    config,
                    output,
                    wall_time_s: start.elapsed().as_secs_f64(),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    results.sort_by_key(|r| r.point.index);
    Ok(results)
}

/// One row per point: its coordinates, then the last row of its series.
pub fn summary_csv(results: &[PointResult]) -> String {
    let mut s = String::from("point,r,x0,t0,seed");
    if let Some(first) = results.first() {
        for c in &first.output.series.columns {
            let _ = write!(s, ",final_{c}");
        }
    }
    s.push('\n');
    let opt = |v: Option<f64>| v.map(format_value).unwrap_or_default();
    for res in results {
        let p = &res.point;
        let _ = write!(
            s,
            "{},{},{},{},{}",
            p.index,
            opt(p.r),
            p.x0.map(|x| x.to_string()).unwrap_or_default(),
            opt(p.t0),
            p.seed.map(|x| x.to_string()).unwrap_or_default()
        );
        if let Some(last) = res.output.series.rows.last() {
            for v in last {
                let _ = write!(s, ",{}", format_value(*v));
            }
        }
        s.push('\n');
    }
    s
}

/// Runs the sweep and writes one run directory per point plus `summary.csv`.
pub fn write_sweep(cfg: &ExperimentConfig, out: &Path, workers: usize) -> Result<Vec<PointResult>> {
    let results = run_sweep(cfg, workers)?;
    create_dir(out)?;
    for r in &results {
        write_run(
            &out.join(r.point.label()),
            &r.config,
            &r.output,
            r.wall_time_s,
        )?;
    }
    write_file(&out.join(SUMMARY_FILE), &summary_csv(&results))?;
    Ok(results)
}
