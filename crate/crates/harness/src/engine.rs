//! Executes one configured experiment in memory.

use bnls::continuum::{
    global_energy_signed, global_mass, local_energy_probes, ContinuumModel, LawsonRk4,
    LeapfrogStepper, LocalEnergyProbe, WaveState,
};
use bnls::field::{
    make_initial_grid, make_initial_lattice, quasi_periodic_torus, GridField, InitialData,
    LatticeField, WeightProfile,
};
use bnls::lattice::{self, wrap_margin_warning, LatticeModel};
use bnls::linear::{adversarial_data, linear_evolve};
use bnls::newton::{newton_iterate, NewtonOptions, RadiusSchedule};

use crate::config::{DataSpec, Engine, ExperimentConfig};
use crate::error::Result;
use crate::series::{
    probe_column, TimeSeries, CONTINUUM_COLUMNS, LATTICE_COLUMNS, LATTICE_LINEAR_COLUMNS,
    NEWTON_COLUMNS, NLW_COLUMNS,
};

/// Series produced by one run plus anything worth flagging in the sidecar.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineOutput {
    pub series: TimeSeries,
    pub warnings: Vec<String>,
    /// Columns drawn in the SVG.
    pub plot_columns: Vec<String>,
}

pub fn execute(cfg: &ExperimentConfig) -> Result<EngineOutput> {
    match cfg.engine {
        Engine::Lattice => run_lattice(cfg),
        Engine::LatticeLinear => run_lattice_linear(cfg),
        Engine::Continuum => run_continuum(cfg),
        Engine::Nlw => run_nlw(cfg),
        Engine::Newton => run_newton(cfg),
    }
}

fn lattice_data(
    cfg: &ExperimentConfig,
    extent: usize,
    warnings: &mut Vec<String>,
) -> Result<LatticeField> {
    let field = match &cfg.data {
        DataSpec::Adversarial { t0 } => adversarial_data(*t0, extent)?,
        spec => {
            let data = spec
                .initial_data(cfg.seed)
                .expect("lattice data kind checked by the parser");
            if let InitialData::Delta { .. } = data {
                warnings.extend(wrap_margin_warning(extent, 0, cfg.run.horizon));
            }
            make_initial_lattice(&data, extent)?
        }
    };
    Ok(field)
}

fn grid_data(cfg: &ExperimentConfig, m: usize, box_length: f64) -> Result<GridField> {
    let data = match &cfg.data {
        DataSpec::QuasiPeriodic { q_max } => quasi_periodic_torus(*q_max).data(),
        spec => spec
            .initial_data(cfg.seed)
            .expect("grid data kind checked by the parser"),
    };
    Ok(make_initial_grid(&data, m, box_length)?)
}

fn run_lattice(cfg: &ExperimentConfig) -> Result<EngineOutput> {
    let l = cfg.lattice.expect("lattice section");
    let w = cfg.weight.expect("weight section");
    let mut warnings = Vec::new();
    let model = LatticeModel::new(l.coupling, l.p, l.extent, l.dt)?;
    let weight = WeightProfile::new(w.x0, w.r, w.t0.unwrap_or(cfg.run.horizon))?;
    let mut psi = lattice_data(cfg, l.extent, &mut warnings)?;
    let records = lattice::run(&mut psi, &model, &weight, &cfg.run.times())?;
    let mut series = TimeSeries::new(LATTICE_COLUMNS);
    let mut last = f64::NEG_INFINITY;
    for r in records {
        // samples closer than dt collapse onto one step
        if r.t <= last {
            continue;
        }
        last = r.t;
        series.push(vec![
            r.t,
            r.sup_abs,
            r.global_mass,
            r.global_energy,
            r.local_mass,
            r.local_energy,
            r.sup_dt,
        ]);
    }
    Ok(EngineOutput {
        series,
        warnings,
        plot_columns: vec!["sup_abs".into(), "local_mass".into(), "local_energy".into()],
    })
}

fn run_lattice_linear(cfg: &ExperimentConfig) -> Result<EngineOutput> {
    let l = cfg.lattice.expect("lattice section");
    let mut warnings = Vec::new();
    let psi0 = lattice_data(cfg, l.extent, &mut warnings)?;
    let mut series = TimeSeries::new(LATTICE_LINEAR_COLUMNS);
    for t in cfg.run.times() {
        let psi = linear_evolve(&psi0, t)?;
        series.push(vec![
            t,
            psi.sup_abs(),
            psi.mass(),
            psi.get(0).map_or(0.0, |v| v.norm()),
        ]);
    }
    Ok(EngineOutput {
        series,
        warnings,
        plot_columns: vec!["sup_abs".into(), "origin_abs".into()],
    })
}

/// Step counts for the sample schedule on a fixed step `dt`, deduplicated.
fn step_targets(times: &[f64], dt: f64) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(times.len());
    for &t in times {
        let n = (t / dt).round() as usize;
        if out.last().is_none_or(|&p| n > p) {
            out.push(n);
        }
    }
    out
}

fn run_continuum(cfg: &ExperimentConfig) -> Result<EngineOutput> {
    let c = cfg.continuum.as_ref().expect("continuum section");
    let phi = c.mollifier.build(c.box_length, c.grid_size);
    let model = ContinuumModel::new(phi, c.box_length, c.grid_size, c.dt, c.coupling)?;
    let mut u = grid_data(cfg, c.grid_size, c.box_length)?;
    let probes = c
        .probes
        .iter()
        .map(|&x0| LocalEnergyProbe::new(x0, c.probe_r))
        .collect::<bnls::Result<Vec<_>>>()?;
    let mut columns: Vec<String> = CONTINUUM_COLUMNS.iter().map(|s| s.to_string()).collect();
    columns.extend(c.probes.iter().map(|&x| probe_column(x)));
    let mut series = TimeSeries::new(&columns);
    let mut stepper = LawsonRk4::new(model);
    let mut done = 0;
    for n in step_targets(&cfg.run.times(), c.dt) {
        stepper.advance(&mut u, n - done)?;
        done = n;
        let mut row = vec![
            n as f64 * c.dt,
            u.sup_abs(),
            global_mass(&u),
            global_energy_signed(&u, &phi, c.coupling),
        ];
        row.extend(local_energy_probes(&u, &probes, &phi)?);
        series.push(row);
    }
    let mut plot_columns = vec!["sup_abs".to_string()];
    plot_columns.extend(columns.iter().skip(CONTINUUM_COLUMNS.len()).cloned());
    Ok(EngineOutput {
        series,
        warnings: Vec::new(),
        plot_columns,
    })
}

fn run_nlw(cfg: &ExperimentConfig) -> Result<EngineOutput> {
    let w = cfg.nlw.expect("nlw section");
    let u0 = grid_data(cfg, w.grid_size, w.box_length)?;
    let mut stepper = LeapfrogStepper::new(w.grid_size, w.box_length, w.dt, w.nonlinearity)?;
    let mut s = WaveState::at_rest(u0);
    let mut series = TimeSeries::new(NLW_COLUMNS);
    let mut done = 0;
    for n in step_targets(&cfg.run.times(), w.dt) {
        stepper.advance(&mut s, n - done)?;
        done = n;
        series.push(vec![
            n as f64 * w.dt,
            s.u.sup_abs(),
            bnls::continuum::nlw_energy(&s, w.nonlinearity),
        ]);
    }
    Ok(EngineOutput {
        series,
        warnings: Vec::new(),
        plot_columns: vec!["sup_abs".into(), "energy".into()],
    })
}

fn run_newton(cfg: &ExperimentConfig) -> Result<EngineOutput> {
    let nw = cfg.newton.expect("newton section");
    let psi0 = grid_data(cfg, nw.grid_size, nw.box_length)?;
    let opts = NewtonOptions {
        steps: nw.steps,
        max_iter: nw.max_iter,
        tol: nw.tol,
        scale: nw.scale,
    };
    let sol = newton_iterate(&psi0, cfg.run.horizon, RadiusSchedule::new(nw.r1)?, opts)?;
    let mut series = TimeSeries::new(NEWTON_COLUMNS);
    for row in &sol.report.rows {
        series.push(vec![
            row.n as f64,
            row.eps,
            row.sup_residual,
            row.ratio.unwrap_or(f64::NAN),
        ]);
    }
    let mut warnings = Vec::new();
    if !sol.report.converged {
        warnings.push(format!(
            "residual above tol = {:e} after {} iterations",
            nw.tol, nw.max_iter
        ));
    }
    Ok(EngineOutput {
        series,
        warnings,
        plot_columns: vec!["eps_n".into(), "sup_residual".into()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(text: &str) -> EngineOutput {
        execute(&ExperimentConfig::parse(text).unwrap()).unwrap()
    }

    #[test]
    fn constant_lattice_data_stays_uniform() {
        let out = run("engine = lattice\nrun.horizon = 2\nrun.samples = 8\ndata.amplitude = 0.7\nlattice.extent = 32\n");
        let sup = out.series.column("sup_abs").unwrap();
        assert_eq!(sup.len(), 9);
        assert!(sup.iter().all(|v| (v - 0.7).abs() < 1e-12));
        let t = out.series.column("t").unwrap();
        assert!(t.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn step_targets_deduplicate() {
        assert_eq!(
            step_targets(&[0.0, 0.001, 0.01, 0.02, 0.021], 0.01),
            vec![0, 1, 2]
        );
    }

    #[test]
    fn linear_lattice_conserves_mass() {
        let out = run("engine = lattice-linear\nrun.horizon = 5\nrun.samples = 5\ndata.kind = delta\nlattice.extent = 64\n");
        for m in out.series.column("global_mass").unwrap() {
            assert!((m - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn continuum_probe_columns() {
        let out = run(
            "engine = continuum\nrun.horizon = 0.01\nrun.samples = 2\ncontinuum.box_length = 32\ncontinuum.grid_size = 64\ncontinuum.probes = -4, 4\n",
        );
        assert_eq!(out.series.columns[4..], ["probe_-4", "probe_4"]);
        assert_eq!(out.series.len(), 3);
    }

    #[test]
    fn newton_rows() {
        let out = run("engine = newton\nnewton.steps = 60\n");
        assert!(!out.series.is_empty());
        let r = out.series.column("sup_residual").unwrap();
        assert!(*r.last().unwrap() <= 1e-10, "{r:?}");
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn nlw_energy_is_flat() {
        let out = run(
            "engine = nlw\nrun.horizon = 1\nrun.samples = 4\nnlw.box_length = 32\nnlw.grid_size = 128\nnlw.dt = 0.005\n",
        );
        let e = out.series.column("energy").unwrap();
        let drift = e.iter().map(|v| (v - e[0]).abs()).fold(0.0, f64::max) / e[0];
        assert!(drift < 1e-4, "{drift}");
    }
}
