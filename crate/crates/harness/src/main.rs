use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bnls::linear::{KernelConvention, KernelTable};
use bnls_harness::acceptance::{acceptance_suite_with, AcceptanceOptions, Level, CRITERIA};
use bnls_harness::error::{exit, HarnessError, Result};
use bnls_harness::fit::fit_growth;
use bnls_harness::run::{run_experiment, write_file};
use bnls_harness::series::{read_series, KernelCsv};
use bnls_harness::sweep::write_sweep;
use bnls_harness::ExperimentConfig;

#[derive(Parser)]
#[command(
    name = "bnls",
    version,
    about = "Lattice and continuum NLS experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its run directory.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the sweep lists of a config on a bounded worker pool.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Fit a log-log growth exponent to one column of a series CSV.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "sup_abs")]
        column: String,
        /// `LO,HI` time window.
        #[arg(long)]
        window: Option<String>,
    },
    /// Run the acceptance suite.
    Accept {
        #[arg(long, default_value = "quick")]
        level: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated criterion ids, e.g. `1,12`.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// Also write the JSON report to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the lattice kernel `K_n(t)` as `n,re,im`.
    ExportKernel {
        #[arg(long)]
        time: f64,
        #[arg(long)]
        half_width: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    ExperimentConfig::parse(&text)
}

fn parse_window(s: &str) -> Result<(f64, f64)> {
    let bad = || HarnessError::Input(format!("window must be `LO,HI`, got `{s}`"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Run { config, out, seed } => {
            let mut cfg = read_config(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let outcome = run_experiment(&cfg, out.as_deref())?;
            for w in &outcome.meta.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "{}: {} rows in {:.2} s -> {}",
                cfg.engine.name(),
                outcome.meta.rows,
                outcome.meta.wall_time_s,
                outcome.dir.display()
            );
        }
        Command::Sweep {
            config,
            out,
            workers,
        } => {
            let cfg = read_config(&config)?;
            let results = write_sweep(&cfg, &out, workers)?;
            println!("{} points -> {}", results.len(), out.display());
        }
        Command::Fit {
            input,
            column,
            window,
        } => {
            let text = fs::read_to_string(&input).map_err(|e| HarnessError::io(&input, e))?;
            let series = read_series(&text)?;
            let window = window.as_deref().map(parse_window).transpose()?;
            let f = fit_growth(&series, &column, window)?;
            println!(
                "slope {:.6} intercept {:.6} window [{}, {}] points {} residual_rms {:.3e}",
                f.slope, f.intercept, f.t_lo, f.t_hi, f.points, f.residual_rms
            );
        }
        Command::Accept {
            level,
            seed,
            only,
            out,
        } => {
            let level = Level::parse(&level).ok_or_else(|| {
                HarnessError::config(0, "level", format!("expected quick or full, got `{level}`"))
            })?;
            if let Some(bad) = only
                .iter()
                .find(|&&id| id == 0 || id as usize > CRITERIA.len())
            {
                return Err(HarnessError::config(
                    0,
                    "only",
                    format!("no criterion {bad}"),
                ));
            }
            let mut opts = AcceptanceOptions {
                level,
                only,
                ..AcceptanceOptions::default()
            };
            if let Some(s) = seed {
                opts.seed = s;
            }
            let report = acceptance_suite_with(&opts, |r| println!("{}", r.line()));
            if let Some(path) = out {
                write_file(&path, &(report.to_json() + "\n"))?;
            }
            let failed = report.failed();
            println!(
                "{} of {} criteria passed",
                report.results.len() - failed,
                report.results.len()
            );
            if failed > 0 {
                return Err(HarnessError::Acceptance { failed });
            }
        }
        Command::ExportKernel {
            time,
            half_width,
            out,
        } => {
            let table = match half_width {
                Some(hw) => KernelTable::new(time, hw, KernelConvention::Laplacian)?,
                None => KernelTable::auto(time, KernelConvention::Laplacian)?,
            };
            let csv = KernelCsv {
                entries: table.entries().map(|(n, k)| (n, k.re, k.im)).collect(),
            };
            write_file(&out, &csv.to_csv())?;
            println!(
                "{} entries, sum |K_n|^2 - 1 = {:.3e}",
                csv.entries.len(),
                csv.total_mass() - 1.0
            );
        }
    }
    Ok(exit::OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
