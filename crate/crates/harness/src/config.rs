//! Flat `key = value` experiment configuration.
//!
//! One entry per line, `#` starts a comment, keys are dotted
//! (`lattice.dt`). Lists are comma separated. Every key must be known and
//! must apply to the selected engine and data kind.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use bnls::continuum::WaveNonlinearity;
use bnls::field::{quasi_periodic_torus, CombCoefficients, Coupling, InitialData, Mollifier};
use num_complex::Complex64;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Lattice,
    LatticeLinear,
    Continuum,
    Nlw,
    Newton,
}

impl Engine {
    pub const ALL: [Engine; 5] = [
        Engine::Lattice,
        Engine::LatticeLinear,
        Engine::Continuum,
        Engine::Nlw,
        Engine::Newton,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Lattice => "lattice",
            Engine::LatticeLinear => "lattice-linear",
            Engine::Continuum => "continuum",
            Engine::Nlw => "nlw",
            Engine::Newton => "newton",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Engine::ALL.into_iter().find(|e| e.name() == s)
    }

    fn on_lattice(self) -> bool {
        matches!(self, Engine::Lattice | Engine::LatticeLinear)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    Linear,
    Geometric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSection {
    pub horizon: f64,
    pub samples: usize,
    pub sampling: Sampling,
    /// First sample time of a geometric schedule.
    pub t_min: f64,
}

impl RunSection {
    /// Recorded times; linear schedules include `t = 0`.
    pub fn times(&self) -> Vec<f64> {
        let n = self.samples;
        match self.sampling {
            Sampling::Linear => (0..=n)
                .map(|i| self.horizon * i as f64 / n as f64)
                .collect(),
            Sampling::Geometric => {
                let (a, b) = (self.t_min.ln(), self.horizon.ln());
                (0..n)
                    .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CombKind {
    Uniform { value: f64 },
    RandomPhase,
    RandomReal,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSpec {
    Constant {
        amplitude: f64,
    },
    RandomPhase {
        amplitude: f64,
    },
    RandomGaussian {
        amplitude: f64,
    },
    GaussianComb {
        amplitude: f64,
        coefficients: CombKind,
    },
    Periodic {
        amplitudes: Vec<f64>,
        frequencies: Vec<f64>,
    },
    Delta {
        amplitude: f64,
    },
    /// Phases aligned with the lattice kernel at time `t0`.
    Adversarial {
        t0: f64,
    },
    /// `cos x + cos(p x / q)` with `p/q` a convergent of `√2`, `q <= q_max`.
    QuasiPeriodic {
        q_max: u64,
    },
}

impl DataSpec {
    fn kind(&self) -> &'static str {
        match self {
            DataSpec::Constant { .. } => "constant",
            DataSpec::RandomPhase { .. } => "random_phase",
            DataSpec::RandomGaussian { .. } => "random_gaussian",
            DataSpec::GaussianComb { .. } => "gaussian_comb",
            DataSpec::Periodic { .. } => "periodic",
            DataSpec::Delta { .. } => "delta",
            DataSpec::Adversarial { .. } => "adversarial",
            DataSpec::QuasiPeriodic { .. } => "quasi_periodic",
        }
    }

    /// The core generator for this spec, if it is one of the plain kinds.
    pub fn initial_data(&self, seed: u64) -> Option<InitialData> {
        Some(match self {
            DataSpec::Constant { amplitude } => InitialData::Constant {
                amplitude: *amplitude,
            },
            DataSpec::RandomPhase { amplitude } => InitialData::RandomPhase {
                amplitude: *amplitude,
                seed,
            },
            DataSpec::RandomGaussian { amplitude } => InitialData::RandomGaussian {
                amplitude: *amplitude,
                seed,
            },
            DataSpec::GaussianComb {
                amplitude,
                coefficients,
            } => InitialData::GaussianComb {
                amplitude: *amplitude,
                coefficients: match coefficients {
                    CombKind::Uniform { value } => CombCoefficients::Uniform {
                        value: Complex64::new(*value, 0.0),
                    },
                    CombKind::RandomPhase => CombCoefficients::RandomPhase { seed },
                    CombKind::RandomReal => CombCoefficients::RandomReal { seed },
                },
            },
            DataSpec::Periodic {
                amplitudes,
                frequencies,
            } => InitialData::Periodic {
                amplitudes: amplitudes.clone(),
                frequencies: frequencies.clone(),
            },
            DataSpec::Delta { amplitude } => InitialData::Delta {
                amplitude: *amplitude,
            },
            DataSpec::Adversarial { .. } | DataSpec::QuasiPeriodic { .. } => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSection {
    pub extent: usize,
    pub dt: f64,
    pub p: f64,
    pub coupling: Coupling,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSection {
    pub x0: i64,
    pub r: f64,
    /// Defaults to the run horizon.
    pub t0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MollifierSpec {
    Gaussian {
        sigma: f64,
    },
    /// `None` selects `K = Mπ/(2L)`.
    Cutoff {
        k: Option<f64>,
    },
    Identity,
}

impl MollifierSpec {
    pub fn build(&self, box_length: f64, grid_size: usize) -> Mollifier {
        match *self {
            MollifierSpec::Gaussian { sigma } => Mollifier::Gaussian { sigma },
            MollifierSpec::Cutoff { k: Some(k) } => Mollifier::FourierCutoff { k },
            MollifierSpec::Cutoff { k: None } => {
                bnls::continuum::ContinuumModel::default_cutoff(box_length, grid_size)
            }
            MollifierSpec::Identity => Mollifier::identity(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuumSection {
    pub box_length: f64,
    pub grid_size: usize,
    pub dt: f64,
    pub mollifier: MollifierSpec,
    pub coupling: Coupling,
    pub probes: Vec<f64>,
    pub probe_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NlwSection {
    pub box_length: f64,
    pub grid_size: usize,
    pub dt: f64,
    pub nonlinearity: WaveNonlinearity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonSection {
    pub box_length: f64,
    pub grid_size: usize,
    pub steps: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub r1: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepSection {
    pub r: Vec<f64>,
    pub x0: Vec<i64>,
    pub t0: Vec<f64>,
    pub seed: Vec<u64>,
}

impl SweepSection {
    pub fn is_empty(&self) -> bool {
        self.r.is_empty() && self.x0.is_empty() && self.t0.is_empty() && self.seed.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputSection {
    pub plot: bool,
    pub loglog: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub engine: Engine,
    pub seed: u64,
    pub out: Option<String>,
    pub run: RunSection,
    pub data: DataSpec,
    pub lattice: Option<LatticeSection>,
    pub weight: Option<WeightSection>,
    pub continuum: Option<ContinuumSection>,
    pub nlw: Option<NlwSection>,
    pub newton: Option<NewtonSection>,
    pub sweep: SweepSection,
    pub output: OutputSection,
}

/// Every key the parser understands.
pub const KNOWN_KEYS: &[&str] = &[
    "engine",
    "seed",
    "out",
    "run.horizon",
    "run.samples",
    "run.sampling",
    "run.t_min",
    "data.kind",
    "data.amplitude",
    "data.coefficients",
    "data.value",
    "data.amplitudes",
    "data.frequencies",
    "data.t0",
    "data.q_max",
    "lattice.extent",
    "lattice.dt",
    "lattice.p",
    "lattice.coupling",
    "weight.x0",
    "weight.r",
    "weight.t0",
    "continuum.box_length",
    "continuum.grid_size",
    "continuum.dt",
    "continuum.mollifier",
    "continuum.sigma",
    "continuum.cutoff",
    "continuum.coupling",
    "continuum.probes",
    "continuum.probe_r",
    "nlw.box_length",
    "nlw.grid_size",
    "nlw.dt",
    "nlw.nonlinearity",
    "nlw.p",
    "newton.box_length",
    "newton.grid_size",
    "newton.steps",
    "newton.max_iter",
    "newton.tol",
    "newton.r1",
    "newton.scale",
    "sweep.r",
    "sweep.x0",
    "sweep.t0",
    "sweep.seed",
    "output.plot",
    "output.loglog",
];

/// Raw entries in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Splits `text` into entries; checks syntax, known keys and duplicates.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>> {
    let mut out: Vec<Entry> = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(HarnessError::config(line, body, "expected `key = value`"));
        };
        let key = k.trim();
        let value = v.trim();
        if key.is_empty() {
            return Err(HarnessError::config(line, key, "empty key"));
        }
        if !KNOWN_KEYS.contains(&key) {
            return Err(HarnessError::config(line, key, "unknown key"));
        }
        if value.is_empty() {
            return Err(HarnessError::config(line, key, "missing value"));
        }
        if !seen.insert(key.to_string()) {
            return Err(HarnessError::config(line, key, "duplicate key"));
        }
        out.push(Entry {
            line,
            key: key.to_string(),
            value: value.to_string(),
        });
    }
    Ok(out)
}

struct Reader {
    map: BTreeMap<String, (String, usize)>,
    used: BTreeSet<String>,
}

impl Reader {
    fn new(entries: Vec<Entry>) -> Self {
        Self {
            map: entries
                .into_iter()
                .map(|e| (e.key, (e.value, e.line)))
                .collect(),
            used: BTreeSet::new(),
        }
    }

    fn raw(&mut self, key: &str) -> Option<(String, usize)> {
        let v = self.map.get(key).cloned();
        if v.is_some() {
            self.used.insert(key.to_string());
        }
        v
    }

    fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    fn parsed<T>(
        &mut self,
        key: &str,
        f: impl Fn(&str) -> Option<T>,
        what: &str,
    ) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => f(&v).map(Some).ok_or_else(|| {
                HarnessError::config(line, key, format!("expected {what}, got `{v}`"))
            }),
        }
    }

    fn f64(&mut self, key: &str, default: f64) -> Result<f64> {
        Ok(self.opt_f64(key)?.unwrap_or(default))
    }

    fn opt_f64(&mut self, key: &str) -> Result<Option<f64>> {
        self.parsed(key, parse_f64, "a finite number")
    }

    fn usize(&mut self, key: &str, default: usize) -> Result<usize> {
        Ok(self
            .parsed(key, |s| s.parse().ok(), "a non-negative integer")?
            .unwrap_or(default))
    }

    fn i64(&mut self, key: &str, default: i64) -> Result<i64> {
        Ok(self
            .parsed(key, |s| s.parse().ok(), "an integer")?
            .unwrap_or(default))
    }

    fn u64(&mut self, key: &str, default: u64) -> Result<u64> {
        Ok(self
            .parsed(key, |s| s.parse().ok(), "a non-negative integer")?
            .unwrap_or(default))
    }

    fn bool(&mut self, key: &str, default: bool) -> Result<bool> {
        Ok(self
            .parsed(
                key,
                |s| match s {
                    "true" => Some(true),
                    "false" => Some(false),
                    _ => None,
                },
                "true or false",
            )?
            .unwrap_or(default))
    }

    fn list<T>(
        &mut self,
        key: &str,
        f: impl Fn(&str) -> Option<T>,
        what: &str,
    ) -> Result<Option<Vec<T>>> {
        self.parsed(
            key,
            |s| {
                s.split(',')
                    .map(|x| f(x.trim()))
                    .collect::<Option<Vec<T>>>()
            },
            what,
        )
    }

    fn line(&self, key: &str) -> usize {
        self.map.get(key).map(|v| v.1).unwrap_or(0)
    }

    fn check(&self, cond: bool, key: &str, message: impl Into<String>) -> Result<()> {
        if cond {
            Ok(())
        } else {
            Err(HarnessError::config(self.line(key), key, message))
        }
    }

    fn finish(self, context: &str) -> Result<()> {
        for (k, (_, line)) in &self.map {
            if !self.used.contains(k) {
                return Err(HarnessError::config(
                    *line,
                    k,
                    format!("does not apply to {context}"),
                ));
            }
        }
        Ok(())
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_coupling(s: &str) -> Option<Coupling> {
    match s {
        "defocusing" => Some(Coupling::Defocusing),
        "focusing" => Some(Coupling::Focusing),
        "linear" => Some(Coupling::Linear),
        _ => None,
    }
}

fn coupling_name(c: Coupling) -> &'static str {
    match c {
        Coupling::Defocusing => "defocusing",
        Coupling::Focusing => "focusing",
        Coupling::Linear => "linear",
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_entries(parse_entries(text)?)
    }

    pub fn from_entries(entries: Vec<Entry>) -> Result<Self> {
        let mut r = Reader::new(entries);
        let engine = match r.raw("engine") {
            None => return Err(HarnessError::config(0, "engine", "missing required key")),
            Some((v, line)) => Engine::parse(&v).ok_or_else(|| {
                HarnessError::config(
                    line,
                    "engine",
                    format!("unknown engine `{v}`; expected one of lattice, lattice-linear, continuum, nlw, newton"),
                )
            })?,
        };
        let seed = r.u64("seed", 0)?;
        let out = r.raw("out").map(|v| v.0);

        let default_horizon = match engine {
            Engine::Newton => 0.3,
            Engine::Continuum => 1.0,
            _ => 10.0,
        };
        let horizon = r.f64("run.horizon", default_horizon)?;
        r.check(horizon > 0.0, "run.horizon", "must be > 0")?;
        let sampling = match r.parsed(
            "run.sampling",
            |s| match s {
                "linear" => Some(Sampling::Linear),
                "geometric" => Some(Sampling::Geometric),
                _ => None,
            },
            "linear or geometric",
        )? {
            Some(s) => s,
            None => Sampling::Linear,
        };
        let samples = r.usize("run.samples", 32)?;
        let t_min = r.f64("run.t_min", horizon / 100.0)?;
        if engine == Engine::Newton {
            for k in ["run.samples", "run.sampling", "run.t_min"] {
                r.check(!r.has(k), k, "does not apply to engine newton")?;
            }
        }
        r.check(samples >= 1, "run.samples", "must be >= 1")?;
        if sampling == Sampling::Geometric {
            r.check(
                samples >= 2,
                "run.samples",
                "geometric sampling needs >= 2 samples",
            )?;
            r.check(
                t_min > 0.0 && t_min < horizon,
                "run.t_min",
                "must satisfy 0 < t_min < horizon",
            )?;
        }
        let run = RunSection {
            horizon,
            samples,
            sampling,
            t_min,
        };

        let data = Self::read_data(&mut r, engine)?;
        let fixed_box = match data {
            DataSpec::QuasiPeriodic { q_max } => Some(quasi_periodic_torus(q_max).box_length),
            _ => None,
        };

        let lattice = if engine.on_lattice() {
            let extent = r.usize("lattice.extent", 1024)?;
            r.check(extent >= 1, "lattice.extent", "must be >= 1")?;
            let (mut dt, mut p, mut coupling) = (0.01, 2.0, Coupling::Linear);
            if engine == Engine::Lattice {
                dt = r.f64("lattice.dt", dt)?;
                r.check(dt > 0.0 && dt <= 0.1, "lattice.dt", "must be in (0, 0.1]")?;
                p = r.f64("lattice.p", p)?;
                r.check(p >= 1.0, "lattice.p", "must be >= 1")?;
                coupling = r
                    .parsed(
                        "lattice.coupling",
                        parse_coupling,
                        "defocusing, focusing or linear",
                    )?
                    .unwrap_or(Coupling::Defocusing);
            }
            Some(LatticeSection {
                extent,
                dt,
                p,
                coupling,
            })
        } else {
            None
        };
        let weight = if engine == Engine::Lattice {
            let x0 = r.i64("weight.x0", 0)?;
            let wr = r.f64("weight.r", 1.0)?;
            r.check(wr >= 1.0, "weight.r", "must be >= 1")?;
            let t0 = r.opt_f64("weight.t0")?;
            if let Some(t0) = t0 {
                r.check(t0 >= horizon, "weight.t0", "must be >= run.horizon")?;
            }
            Some(WeightSection { x0, r: wr, t0 })
        } else {
            None
        };
        let continuum = if engine == Engine::Continuum {
            let box_length = match fixed_box {
                Some(l) => l,
                None => r.f64("continuum.box_length", 64.0)?,
            };
            let grid_size = r.usize("continuum.grid_size", 256)?;
            let dt = r.f64("continuum.dt", 1e-3)?;
            let mollifier = match r
                .parsed(
                    "continuum.mollifier",
                    |s| match s {
                        "gaussian" | "cutoff" | "identity" => Some(s.to_string()),
                        _ => None,
                    },
                    "gaussian, cutoff or identity",
                )?
                .as_deref()
            {
                None | Some("gaussian") => {
                    let sigma = r.f64("continuum.sigma", 1.0)?;
                    r.check(sigma > 0.0, "continuum.sigma", "must be > 0")?;
                    MollifierSpec::Gaussian { sigma }
                }
                Some("cutoff") => {
                    let k = r.opt_f64("continuum.cutoff")?;
                    if let Some(k) = k {
                        r.check(k > 0.0, "continuum.cutoff", "must be > 0")?;
                    }
                    MollifierSpec::Cutoff { k }
                }
                _ => MollifierSpec::Identity,
            };
            let coupling = r
                .parsed(
                    "continuum.coupling",
                    parse_coupling,
                    "defocusing, focusing or linear",
                )?
                .unwrap_or(Coupling::Defocusing);
            let probes = r
                .list("continuum.probes", parse_f64, "a list of numbers")?
                .unwrap_or_default();
            let probe_r = r.f64("continuum.probe_r", 1.0)?;
            r.check(probe_r >= 1.0, "continuum.probe_r", "must be >= 1")?;
            check_grid(&r, "continuum", box_length, grid_size, dt)?;
            Some(ContinuumSection {
                box_length,
                grid_size,
                dt,
                mollifier,
                coupling,
                probes,
                probe_r,
            })
        } else {
            None
        };
        let nlw = if engine == Engine::Nlw {
            let box_length = match fixed_box {
                Some(l) => l,
                None => r.f64("nlw.box_length", 64.0)?,
            };
            let grid_size = r.usize("nlw.grid_size", 512)?;
            let dt = r.f64("nlw.dt", box_length / grid_size.max(1) as f64 / 4.0)?;
            let nonlinearity = match r
                .parsed(
                    "nlw.nonlinearity",
                    |s| matches!(s, "power" | "linear").then(|| s.to_string()),
                    "power or linear",
                )?
                .as_deref()
            {
                Some("linear") => WaveNonlinearity::Linear,
                _ => {
                    let p = r.u64("nlw.p", 1)?;
                    r.check((1..=8).contains(&p), "nlw.p", "must be in 1..=8")?;
                    WaveNonlinearity::Power { p: p as u32 }
                }
            };
            check_grid(&r, "nlw", box_length, grid_size, dt)?;
            Some(NlwSection {
                box_length,
                grid_size,
                dt,
                nonlinearity,
            })
        } else {
            None
        };
        let newton = if engine == Engine::Newton {
            let box_length = match fixed_box {
                Some(l) => l,
                None => r.f64("newton.box_length", 2.0 * std::f64::consts::PI)?,
            };
            let grid_size = r.usize("newton.grid_size", 32)?;
            let steps = r.usize("newton.steps", 300)?;
            r.check(steps >= 3, "newton.steps", "must be >= 3")?;
            let max_iter = r.usize("newton.max_iter", 5)?;
            r.check(max_iter >= 1, "newton.max_iter", "must be >= 1")?;
            let tol = r.f64("newton.tol", 1e-10)?;
            r.check(tol >= 0.0, "newton.tol", "must be >= 0")?;
            let r1 = r.f64("newton.r1", 1.0)?;
            r.check(r1 > 0.0, "newton.r1", "must be > 0")?;
            let scale = r.f64("newton.scale", 1.0)?;
            r.check(scale > 0.0, "newton.scale", "must be > 0")?;
            check_grid(&r, "newton", box_length, grid_size, 1.0)?;
            Some(NewtonSection {
                box_length,
                grid_size,
                steps,
                max_iter,
                tol,
                r1,
                scale,
            })
        } else {
            None
        };

        let mut sweep = SweepSection::default();
        if let Some(v) = r.list("sweep.r", parse_f64, "a list of numbers")? {
            r.check(
                matches!(engine, Engine::Lattice | Engine::Continuum),
                "sweep.r",
                "applies to the lattice and continuum engines only",
            )?;
            r.check(
                v.iter().all(|&x| x >= 1.0),
                "sweep.r",
                "values must be >= 1",
            )?;
            sweep.r = v;
        }
        if let Some(v) = r.list("sweep.x0", |s| s.parse::<i64>().ok(), "a list of integers")? {
            r.check(
                matches!(engine, Engine::Lattice | Engine::Continuum),
                "sweep.x0",
                "applies to the lattice and continuum engines only",
            )?;
            sweep.x0 = v;
        }
        if let Some(v) = r.list("sweep.t0", parse_f64, "a list of numbers")? {
            r.check(
                engine == Engine::Lattice,
                "sweep.t0",
                "applies to the lattice engine only",
            )?;
            r.check(
                v.iter().all(|&x| x >= horizon),
                "sweep.t0",
                "values must be >= run.horizon",
            )?;
            sweep.t0 = v;
        }
        if let Some(v) = r.list(
            "sweep.seed",
            |s| s.parse::<u64>().ok(),
            "a list of non-negative integers",
        )? {
            sweep.seed = v;
        }

        let output = OutputSection {
            plot: r.bool("output.plot", true)?,
            loglog: r.bool("output.loglog", sampling == Sampling::Geometric)?,
        };

        r.finish(&format!(
            "engine {} with data.kind = {}",
            engine.name(),
            data.kind()
        ))?;
        Ok(Self {
            engine,
            seed,
            out,
            run,
            data,
            lattice,
            weight,
            continuum,
            nlw,
            newton,
            sweep,
            output,
        })
    }

    fn read_data(r: &mut Reader, engine: Engine) -> Result<DataSpec> {
        let kind = r.raw("data.kind").map(|v| v.0).unwrap_or_else(|| {
            match engine {
                Engine::Lattice | Engine::LatticeLinear => "constant",
                Engine::Newton => "periodic",
                _ => "gaussian_comb",
            }
            .to_string()
        });
        let amp = |r: &mut Reader| -> Result<f64> {
            let a = r.f64("data.amplitude", 1.0)?;
            r.check(a >= 0.0, "data.amplitude", "must be >= 0")?;
            Ok(a)
        };
        let spec = match kind.as_str() {
            "constant" => DataSpec::Constant { amplitude: amp(r)? },
            "random_phase" => DataSpec::RandomPhase { amplitude: amp(r)? },
            "random_gaussian" => DataSpec::RandomGaussian { amplitude: amp(r)? },
            "delta" => DataSpec::Delta { amplitude: amp(r)? },
            "gaussian_comb" => {
                let amplitude = amp(r)?;
                let coefficients = match r
                    .parsed(
                        "data.coefficients",
                        |s| {
                            matches!(s, "uniform" | "random_phase" | "random_real")
                                .then(|| s.to_string())
                        },
                        "uniform, random_phase or random_real",
                    )?
                    .as_deref()
                {
                    None | Some("uniform") => {
                        let value = r.f64("data.value", 1.0)?;
                        r.check(value.abs() <= 1.0, "data.value", "need |a_j| <= 1")?;
                        CombKind::Uniform { value }
                    }
                    Some("random_phase") => CombKind::RandomPhase,
                    _ => CombKind::RandomReal,
                };
                DataSpec::GaussianComb {
                    amplitude,
                    coefficients,
                }
            }
            "periodic" => {
                let amplitudes = r
                    .list("data.amplitudes", parse_f64, "a list of numbers")?
                    .unwrap_or_else(|| vec![if engine == Engine::Newton { 0.1 } else { 1.0 }]);
                let frequencies = r
                    .list("data.frequencies", parse_f64, "a list of numbers")?
                    .unwrap_or_else(|| vec![1.0]);
                r.check(
                    amplitudes.len() == frequencies.len(),
                    "data.frequencies",
                    "needs as many entries as data.amplitudes",
                )?;
                DataSpec::Periodic {
                    amplitudes,
                    frequencies,
                }
            }
            "adversarial" => {
                let t0 = r.f64("data.t0", 25.0)?;
                r.check(t0 > 0.0, "data.t0", "must be > 0")?;
                DataSpec::Adversarial { t0 }
            }
            "quasi_periodic" => {
                let q_max = r.u64("data.q_max", 200)?;
                r.check(q_max >= 1, "data.q_max", "must be >= 1")?;
                DataSpec::QuasiPeriodic { q_max }
            }
            other => {
                return Err(HarnessError::config(
                    r.line("data.kind"),
                    "data.kind",
                    format!("unknown data kind `{other}`"),
                ))
            }
        };
        let lattice_only = matches!(
            spec,
            DataSpec::RandomPhase { .. }
                | DataSpec::RandomGaussian { .. }
                | DataSpec::Delta { .. }
                | DataSpec::Adversarial { .. }
        );
        let grid_only = matches!(spec, DataSpec::QuasiPeriodic { .. });
        if grid_only {
            for k in [
                "continuum.box_length",
                "nlw.box_length",
                "newton.box_length",
            ] {
                r.check(!r.has(k), k, "the box length is fixed by data.q_max")?;
            }
        }
        if (lattice_only && !engine.on_lattice()) || (grid_only && engine.on_lattice()) {
            return Err(HarnessError::config(
                r.line("data.kind"),
                "data.kind",
                format!(
                    "`{}` is not available for engine {}",
                    spec.kind(),
                    engine.name()
                ),
            ));
        }
        Ok(spec)
    }

    /// Canonical `(key, value)` pairs; parsing them back gives `self`.
    pub fn pairs(&self) -> Vec<(String, String)> {
        let mut v: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, val: String| v.push((k.to_string(), val));
        let list = |xs: &[f64]| {
            xs.iter()
                .map(|x| format!("{x:?}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let quasi = matches!(self.data, DataSpec::QuasiPeriodic { .. });
        put("engine", self.engine.name().into());
        put("seed", self.seed.to_string());
        if let Some(o) = &self.out {
            put("out", o.clone());
        }
        put("run.horizon", format!("{:?}", self.run.horizon));
        if self.engine != Engine::Newton {
            put("run.samples", self.run.samples.to_string());
            put(
                "run.sampling",
                match self.run.sampling {
                    Sampling::Linear => "linear",
                    Sampling::Geometric => "geometric",
                }
                .into(),
            );
            put("run.t_min", format!("{:?}", self.run.t_min));
        }
        put("data.kind", self.data.kind().into());
        match &self.data {
            DataSpec::Constant { amplitude }
            | DataSpec::RandomPhase { amplitude }
            | DataSpec::RandomGaussian { amplitude }
            | DataSpec::Delta { amplitude } => put("data.amplitude", format!("{amplitude:?}")),
            DataSpec::GaussianComb {
                amplitude,
                coefficients,
            } => {
                put("data.amplitude", format!("{amplitude:?}"));
                match coefficients {
                    CombKind::Uniform { value } => {
                        put("data.coefficients", "uniform".into());
                        put("data.value", format!("{value:?}"));
                    }
                    CombKind::RandomPhase => put("data.coefficients", "random_phase".into()),
                    CombKind::RandomReal => put("data.coefficients", "random_real".into()),
                }
            }
            DataSpec::Periodic {
                amplitudes,
                frequencies,
            } => {
                put("data.amplitudes", list(amplitudes));
                put("data.frequencies", list(frequencies));
            }
            DataSpec::Adversarial { t0 } => put("data.t0", format!("{t0:?}")),
            DataSpec::QuasiPeriodic { q_max } => put("data.q_max", q_max.to_string()),
        }
        if let Some(l) = &self.lattice {
            put("lattice.extent", l.extent.to_string());
            if self.engine == Engine::Lattice {
                put("lattice.dt", format!("{:?}", l.dt));
                put("lattice.p", format!("{:?}", l.p));
                put("lattice.coupling", coupling_name(l.coupling).into());
            }
        }
        if let Some(w) = &self.weight {
            put("weight.x0", w.x0.to_string());
            put("weight.r", format!("{:?}", w.r));
            if let Some(t0) = w.t0 {
                put("weight.t0", format!("{t0:?}"));
            }
        }
        if let Some(c) = &self.continuum {
            if !quasi {
                put("continuum.box_length", format!("{:?}", c.box_length));
            }
            put("continuum.grid_size", c.grid_size.to_string());
            put("continuum.dt", format!("{:?}", c.dt));
            match c.mollifier {
                MollifierSpec::Gaussian { sigma } => {
                    put("continuum.mollifier", "gaussian".into());
                    put("continuum.sigma", format!("{sigma:?}"));
                }
                MollifierSpec::Cutoff { k } => {
                    put("continuum.mollifier", "cutoff".into());
                    if let Some(k) = k {
                        put("continuum.cutoff", format!("{k:?}"));
                    }
                }
                MollifierSpec::Identity => put("continuum.mollifier", "identity".into()),
            }
            put("continuum.coupling", coupling_name(c.coupling).into());
            if !c.probes.is_empty() {
                put("continuum.probes", list(&c.probes));
            }
            put("continuum.probe_r", format!("{:?}", c.probe_r));
        }
        if let Some(n) = &self.nlw {
            if !quasi {
                put("nlw.box_length", format!("{:?}", n.box_length));
            }
            put("nlw.grid_size", n.grid_size.to_string());
            put("nlw.dt", format!("{:?}", n.dt));
            match n.nonlinearity {
                WaveNonlinearity::Linear => put("nlw.nonlinearity", "linear".into()),
                WaveNonlinearity::Power { p } => {
                    put("nlw.nonlinearity", "power".into());
                    put("nlw.p", p.to_string());
                }
            }
        }
        if let Some(n) = &self.newton {
            if !quasi {
                put("newton.box_length", format!("{:?}", n.box_length));
            }
            put("newton.grid_size", n.grid_size.to_string());
            put("newton.steps", n.steps.to_string());
            put("newton.max_iter", n.max_iter.to_string());
            put("newton.tol", format!("{:?}", n.tol));
            put("newton.r1", format!("{:?}", n.r1));
            put("newton.scale", format!("{:?}", n.scale));
        }
        let join = |xs: Vec<String>| xs.join(", ");
        if !self.sweep.r.is_empty() {
            put("sweep.r", list(&self.sweep.r));
        }
        if !self.sweep.x0.is_empty() {
            put(
                "sweep.x0",
                join(self.sweep.x0.iter().map(|x| x.to_string()).collect()),
            );
        }
        if !self.sweep.t0.is_empty() {
            put("sweep.t0", list(&self.sweep.t0));
        }
        if !self.sweep.seed.is_empty() {
            put(
                "sweep.seed",
                join(self.sweep.seed.iter().map(|x| x.to_string()).collect()),
            );
        }
        put("output.plot", self.output.plot.to_string());
        put("output.loglog", self.output.loglog.to_string());
        v
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.pairs() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

fn check_grid(r: &Reader, section: &str, box_length: f64, grid_size: usize, dt: f64) -> Result<()> {
    let key = |k: &str| format!("{section}.{k}");
    r.check(box_length > 0.0, &key("box_length"), "must be > 0")?;
    r.check(
        grid_size >= 8 && grid_size.is_power_of_two(),
        &key("grid_size"),
        "must be a power of two >= 8",
    )?;
    r.check(dt > 0.0, &key("dt"), "must be > 0")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_lattice_config() {
        let c = ExperimentConfig::parse("engine = lattice\n").unwrap();
        assert_eq!(c.engine, Engine::Lattice);
        assert_eq!(c.lattice.unwrap().dt, 0.01);
        assert_eq!(c.data, DataSpec::Constant { amplitude: 1.0 });
        assert!(c.continuum.is_none());
    }

    #[test]
    fn comments_and_lists() {
        let text = "# header\nengine = continuum  # trailing\ncontinuum.probes = -8, 0, 8.5\n\n";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.continuum.unwrap().probes, vec![-8.0, 0.0, 8.5]);
    }

    #[test]
    fn rejects_bad_engine_naming_the_field() {
        let e = ExperimentConfig::parse("engine = lattices\n").unwrap_err();
        let msg = e.to_string();
        assert!(
            msg.contains("`engine`") && msg.contains("lattices"),
            "{msg}"
        );
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn rejects_unknown_and_inapplicable_keys() {
        let e = ExperimentConfig::parse("engine = lattice\nlattice.dtt = 0.1\n").unwrap_err();
        assert!(e.to_string().contains("lattice.dtt"));
        let e = ExperimentConfig::parse("engine = lattice\nnlw.dt = 0.1\n").unwrap_err();
        assert!(e.to_string().contains("nlw.dt") && e.to_string().contains("does not apply"));
        let e = ExperimentConfig::parse("engine = lattice\ndata.kind = constant\ndata.t0 = 3\n")
            .unwrap_err();
        assert!(e.to_string().contains("data.t0"));
        let e = ExperimentConfig::parse("engine = nlw\ndata.kind = delta\n").unwrap_err();
        assert!(e.to_string().contains("data.kind"));
    }

    #[test]
    fn rejects_malformed_lines() {
        for text in [
            "engine lattice\n",
            "engine = lattice\nengine = nlw\n",
            "engine = lattice\nlattice.dt =\n",
            "engine = lattice\nlattice.dt = fast\n",
            "engine = lattice\nlattice.dt = 0.5\n",
            "engine = lattice\nlattice.dt = NaN\n",
            "seed = 1\n",
        ] {
            assert!(ExperimentConfig::parse(text).is_err(), "{text:?}");
        }
    }

    #[test]
    fn round_trips_through_text() {
        let text = "engine = lattice\nseed = 9\nrun.horizon = 50\nrun.sampling = geometric\nrun.t_min = 1\n\
                    data.kind = periodic\ndata.amplitudes = 1, 0.5\ndata.frequencies = 1, 1.4142135623730951\n\
                    weight.t0 = 60\nsweep.r = 1, 2\nsweep.seed = 3, 4\n";
        let c = ExperimentConfig::parse(text).unwrap();
        let again = ExperimentConfig::parse(&c.to_text()).unwrap();
        assert_eq!(c, again);
        for engine in ["lattice-linear", "continuum", "nlw", "newton"] {
            let c = ExperimentConfig::parse(&format!("engine = {engine}\n")).unwrap();
            assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
        }
    }

    const VALUES: &[&str] = &[
        "lattice",
        "lattice-linear",
        "continuum",
        "nlw",
        "newton",
        "0",
        "1",
        "2.5",
        "-3",
        "1e-3",
        "0.01",
        "64",
        "128",
        "1, 2",
        "-4, 0, 4",
        "constant",
        "random_phase",
        "random_gaussian",
        "gaussian_comb",
        "periodic",
        "delta",
        "adversarial",
        "quasi_periodic",
        "uniform",
        "random_real",
        "gaussian",
        "cutoff",
        "identity",
        "focusing",
        "defocusing",
        "linear",
        "geometric",
        "true",
        "false",
        "power",
        "cubic",
        "inf",
        "x",
    ];

    fn line() -> impl Strategy<Value = String> {
        (0..KNOWN_KEYS.len(), 0..VALUES.len())
            .prop_map(|(k, v)| format!("{} = {}", KNOWN_KEYS[k], VALUES[v]))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn parsed_configs_round_trip(engine in 0..5usize, lines in proptest::collection::vec(line(), 0..8)) {
            let mut text = format!("engine = {}\n", Engine::ALL[engine].name());
            for l in lines {
                text.push_str(&l);
                text.push('\n');
            }
            if let Ok(c) = ExperimentConfig::parse(&text) {
                let again = ExperimentConfig::parse(&c.to_text());
                prop_assert_eq!(again.as_ref().ok(), Some(&c), "{}", text);
            }
        }

        #[test]
        fn arbitrary_text_never_panics(text in "\\PC{0,200}") {
            let _ = ExperimentConfig::parse(&text);
        }
    }

    #[test]
    fn sample_schedules() {
        let c = ExperimentConfig::parse(
            "engine = lattice\nrun.horizon = 100\nrun.sampling = geometric\nrun.t_min = 1\nrun.samples = 3\n",
        )
        .unwrap();
        let t = c.run.times();
        assert_eq!(t.len(), 3);
        assert!((t[1] - 10.0).abs() < 1e-12 && (t[2] - 100.0).abs() < 1e-12);
        let c = ExperimentConfig::parse("engine = lattice\nrun.horizon = 1\nrun.samples = 4\n")
            .unwrap();
        assert_eq!(c.run.times(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
