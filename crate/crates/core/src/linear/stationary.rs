use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Constant offset in the stationary-phase angle.
///
/// `PlusQuarter` uses `φ = π/4 + t cos θ_s + n θ_s`. `Classical` uses `-π/4`, which
/// is what the Debye asymptotics of `i^n J_n(t)` give; it reproduces
/// `J_0(t) ~ (2/(πt))^{1/2} cos(t - π/4)` at `n = 0`. Both conventions give
/// the same envelope and the same pairing argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseConvention {
    PlusQuarter,
    Classical,
}

impl PhaseConvention {
    fn offset(self) -> f64 {
        match self {
            PhaseConvention::PlusQuarter => FRAC_PI_4,
            PhaseConvention::Classical => -FRAC_PI_4,
        }
    }
}

/// Saddle-point data for `F_n(t) = (2π)^{-1}∫ e^{it cos θ + inθ} dθ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryPhaseApprox {
    pub t: f64,
    pub n: i64,
    /// `sin θ_s = n/t`.
    pub theta_s: f64,
    pub phi: f64,
    /// `(2/(π t cos θ_s))^{1/2}`.
    pub amplitude: f64,
}

impl StationaryPhaseApprox {
    /// Valid for `|n| <= t/2`, away from the turning point `|n| = t`.
    pub fn new(t: f64, n: i64, convention: PhaseConvention) -> Result<Self> {
        if !(t > 0.0) || (n.abs() as f64) > 0.5 * t {
            return Err(Error::OutsideStationaryRegime { t, n });
        }
        Ok(Self::unchecked(t, n, convention))
    }

    fn unchecked(t: f64, n: i64, convention: PhaseConvention) -> Self {
        let s = n as f64 / t;
        let theta_s = s.asin();
        let cos_s = (1.0 - s * s).sqrt();
        Self {
            t,
            n,
            theta_s,
            phi: convention.offset() + t * cos_s + n as f64 * theta_s,
            amplitude: (2.0 / (PI * t * cos_s)).sqrt(),
        }
    }

    /// `amplitude · cos φ` for even `n`, `i · amplitude · sin φ` for odd `n`.
    pub fn value(&self) -> Complex64 {
        if self.n % 2 == 0 {
            Complex64::new(self.amplitude * self.phi.cos(), 0.0)
        } else {
            Complex64::new(0.0, self.amplitude * self.phi.sin())
        }
    }
}

/// Stationary-phase approximation of `F_n(t)`, `t >= 20`, `|n| <= t/2`.
pub fn stationary_phase_eval(t: f64, n: i64) -> Result<Complex64> {
    stationary_phase_eval_with(t, n, PhaseConvention::Classical)
}

pub fn stationary_phase_eval_with(
    t: f64,
    n: i64,
    convention: PhaseConvention,
) -> Result<Complex64> {
    if t < 20.0 {
        return Err(Error::OutsideStationaryRegime { t, n });
    }
    Ok(StationaryPhaseApprox::new(t, n, convention)?.value())
}

/// For every even `|n| <= t/2`: `max(|cos φ(t,n)|, |sin φ(t,n+1)|) >= 1/4`.
pub fn pairing_check(t: f64) -> bool {
    pairing_check_with(t, PhaseConvention::PlusQuarter)
}

pub fn pairing_check_with(t: f64, convention: PhaseConvention) -> bool {
    if !(t >= 20.0) {
        return false;
    }
    let lim = (0.5 * t).floor() as i64;
    let start = -lim + (lim % 2).abs();
    (start..=lim).step_by(2).all(|n| {
        let a = StationaryPhaseApprox::unchecked(t, n, convention);
        let b = StationaryPhaseApprox::unchecked(t, n + 1, convention);
        a.phi.cos().abs().max(b.phi.sin().abs()) >= 0.25
    })
}
