use num_complex::Complex64;
use rayon::prelude::*;

use super::nls::{Nonlinearity, Trajectory};
use super::spectral::SpectralGrid;
use crate::error::{Error, Result};
use crate::field::{chi, GridField, Mollifier};

/// Local energy window `χ((x - x0)/R)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalEnergyProbe {
    x0: f64,
    r: f64,
}

impl LocalEnergyProbe {
    pub fn new(x0: f64, r: f64) -> Result<Self> {
        if !(r >= 1.0) || !r.is_finite() {
            return Err(Error::invalid("R", format!("must be >= 1, got {r}")));
        }
        if !x0.is_finite() {
            return Err(Error::invalid("x0", "must be finite"));
        }
        Ok(Self { x0, r })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `[x0 - 2R, x0 + 2R]` must sit inside `[-L/2, L/2]` with margin `L/8`.
    pub fn check_window(&self, box_length: f64) -> Result<()> {
        let (lo, hi) = (self.x0 - 2.0 * self.r, self.x0 + 2.0 * self.r);
        let inner = 0.5 * box_length - box_length / 8.0;
        if lo < -inner || hi > inner {
            return Err(Error::ProbeWindow {
                lo,
                hi,
                box_lo: -inner,
                box_hi: inner,
            });
        }
        Ok(())
    }

    /// `∫ χ((x - x0)/R)² ρ(x) dx` for grid samples `ρ`.
    pub fn integrate(&self, density: &[f64], u: &GridField) -> f64 {
        let h = u.spacing();
        let lo = self.x0 - 2.0 * self.r;
        let hi = self.x0 + 2.0 * self.r;
        let j0 = ((lo + 0.5 * u.box_length()) / h).floor().max(0.0) as usize;
        let j1 = (((hi + 0.5 * u.box_length()) / h).ceil() as usize).min(u.len() - 1);
        let mut acc = 0.0;
        for (j, rho) in density.iter().enumerate().take(j1 + 1).skip(j0) {
            let w = chi((u.x(j) - self.x0) / self.r);
            acc += w * w * rho;
        }
        h * acc
    }
}

/// Samples of `½|u_x|² + ¼|φ∗u|⁴ + ½|u|²`.
pub fn local_energy_density(u: &GridField, phi: &Mollifier) -> Vec<f64> {
    let mut nl = Nonlinearity::new(SpectralGrid::for_field(u), phi);
    density_with(&mut nl, u)
}

fn density_with(nl: &mut Nonlinearity, u: &GridField) -> Vec<f64> {
    let ux = nl.grid().derivative(u);
    let mut hat = u.values().to_vec();
    nl.grid().forward(&mut hat);
    let v = nl.smoothed(&hat);
    u.values()
        .iter()
        .zip(ux.values())
        .zip(&v)
        .map(|((a, d), s): ((&Complex64, &Complex64), &Complex64)| {
            0.5 * d.norm_sqr() + 0.25 * s.norm_sqr() * s.norm_sqr() + 0.5 * a.norm_sqr()
        })
        .collect()
}

/// `E(x0, t) = ∫ χ((x - x0)/R)² [½|u_x|² + ¼|φ∗u|⁴ + ½|u|²] dx`.
pub fn local_energy_probe(u: &GridField, probe: &LocalEnergyProbe, phi: &Mollifier) -> Result<f64> {
    probe.check_window(u.box_length())?;
    Ok(probe.integrate(&local_energy_density(u, phi), u))
}

/// Local energies at several probes from one density evaluation.
pub fn local_energy_probes(
    u: &GridField,
    probes: &[LocalEnergyProbe],
    phi: &Mollifier,
) -> Result<Vec<f64>> {
    for p in probes {
        p.check_window(u.box_length())?;
    }
    let rho = local_energy_density(u, phi);
    Ok(probes.iter().map(|p| p.integrate(&rho, u)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapReport {
    /// `sup_{x0, t} E(x0, t) / max_{x0} E(x0, 0)`.
    pub ratio: f64,
    pub worst_time: f64,
    pub worst_x0: f64,
    pub factor: f64,
    pub flagged: bool,
    pub note: Option<String>,
    /// `energies[j][i]`: probe `i` at `times[j]`.
    pub times: Vec<f64>,
    pub energies: Vec<Vec<f64>>,
}

/// Local energy growth over a trajectory covering `[0, R^{1/8}]`.
///
/// Snapshots are evaluated in parallel; each worker plans its own FFT.
pub fn bootstrap_monitor(
    trajectory: &Trajectory,
    centers: &[f64],
    r: f64,
    phi: &Mollifier,
    factor: f64,
) -> Result<BootstrapReport> {
    let first = trajectory
        .states
        .first()
        .ok_or_else(|| Error::invalid("trajectory", "is empty"))?;
    let horizon = r.powf(0.125);
    let end = *trajectory.times.last().unwrap();
    if end < horizon * (1.0 - 1e-12) {
        return Err(Error::invalid(
            "trajectory",
            format!("ends at t = {end}, needs R^(1/8) = {horizon}"),
        ));
    }
    let probes = centers
        .iter()
        .map(|&x0| LocalEnergyProbe::new(x0, r))
        .collect::<Result<Vec<_>>>()?;
    for p in &probes {
        p.check_window(first.box_length())?;
    }
    let energies: Vec<Vec<f64>> = trajectory
        .states
        .par_iter()
        .map_init(
            || Nonlinearity::new(SpectralGrid::for_field(first), phi),
            |nl, u| {
                let rho = density_with(nl, u);
                probes.iter().map(|p| p.integrate(&rho, u)).collect()
            },
        )
        .collect();
    let base = energies[0].iter().cloned().fold(0.0, f64::max);
    let mut worst = (0.0f64, 0.0, centers.first().copied().unwrap_or(0.0));
    for (j, row) in energies.iter().enumerate() {
        for (i, &e) in row.iter().enumerate() {
            if e > worst.0 {
                worst = (e, trajectory.times[j], centers[i]);
            }
        }
    }
    let (ratio, note) = if base > 0.0 {
        (worst.0 / base, None)
    } else if worst.0 == 0.0 {
        (
            0.0,
            Some("zero local energy throughout; ratio 0/0 treated as pass".to_string()),
        )
    } else {
        (
            f64::INFINITY,
            Some("energy appeared from zero initial local energy".to_string()),
        )
    };
    Ok(BootstrapReport {
        ratio,
        worst_time: worst.1,
        worst_x0: worst.2,
        factor,
        flagged: ratio > factor,
        note,
        times: trajectory.times.clone(),
        energies,
    })
}
