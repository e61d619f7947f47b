use num_complex::Complex64;

use super::spectral::{box_integral, SpectralGrid};
use crate::error::{Error, Result};
use crate::field::{chi, GridField};

/// Force term of `u_tt - u_xx + |u|^{2p} u = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveNonlinearity {
    Linear,
    Power { p: u32 },
}

impl WaveNonlinearity {
    pub const CUBIC: Self = WaveNonlinearity::Power { p: 1 };

    fn force(self, u: Complex64) -> Complex64 {
        match self {
            WaveNonlinearity::Linear => Complex64::new(0.0, 0.0),
            WaveNonlinearity::Power { p } => u * u.norm_sqr().powi(p as i32),
        }
    }

    fn potential(self, u: Complex64) -> f64 {
        match self {
            WaveNonlinearity::Linear => 0.0,
            WaveNonlinearity::Power { p } => {
                let q = 2 * p + 2;
                u.norm().powi(q as i32) / q as f64
            }
        }
    }
}

/// Displacement `u` and velocity `v = u_t` on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub u: GridField,
    pub v: GridField,
}

impl WaveState {
    pub fn new(u: GridField, v: GridField) -> Result<Self> {
        if !u.same_grid(&v) {
            return Err(Error::GridMismatch(
                "u and v live on different grids".into(),
            ));
        }
        Ok(Self { u, v })
    }

    pub fn at_rest(u: GridField) -> Self {
        let v = GridField::zeros(u.len(), u.box_length()).expect("same grid as u");
        Self { u, v }
    }
}

/// Velocity Störmer–Verlet with spectral `u_xx`; the acceleration of the
/// current state is cached between steps.
#[derive(Debug, Clone)]
pub struct LeapfrogStepper {
    grid: SpectralGrid,
    nonlinearity: WaveNonlinearity,
    dt: f64,
    accel: Option<Vec<Complex64>>,
    steps: usize,
}

impl LeapfrogStepper {
    /// Requires `dt <= h`.
    pub fn new(m: usize, box_length: f64, dt: f64, nonlinearity: WaveNonlinearity) -> Result<Self> {
        let grid = SpectralGrid::new(m, box_length)?;
        let h = grid.spacing();
        if !(dt > 0.0 && dt <= h) {
            return Err(Error::Cfl { dt, h });
        }
        Ok(Self {
            grid,
            nonlinearity,
            dt,
            accel: None,
            steps: 0,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn acceleration(&mut self, u: &GridField) -> Vec<Complex64> {
        let uxx = self.grid.second_derivative(u);
        uxx.values()
            .iter()
            .zip(u.values())
            .map(|(a, &b)| a - self.nonlinearity.force(b))
            .collect()
    }

    pub fn step(&mut self, s: &mut WaveState) -> Result<()> {
        self.advance(s, 1)
    }

    pub fn advance(&mut self, s: &mut WaveState, n: usize) -> Result<()> {
        self.grid.check(&s.u)?;
        self.grid.check(&s.v)?;
        let dt = self.dt;
        let mut a = match self.accel.take() {
            Some(a) => a,
            None => self.acceleration(&s.u),
        };
        for _ in 0..n {
            for ((u, v), acc) in s.u.values_mut().iter_mut().zip(s.v.values_mut()).zip(&a) {
                *v += 0.5 * dt * acc;
                *u += dt * *v;
            }
            a = self.acceleration(&s.u);
            let mut sup = 0.0f64;
            for (v, acc) in s.v.values_mut().iter_mut().zip(&a) {
                *v += 0.5 * dt * acc;
                sup = sup.max(v.norm_sqr());
            }
            self.steps += 1;
            if !sup.is_finite() {
                return Err(Error::NumericalAbort {
                    step: self.steps,
                    reason: "non-finite velocity".into(),
                });
            }
        }
        self.accel = Some(a);
        Ok(())
    }

    /// Drop the cached acceleration after editing the state externally.
    pub fn reset(&mut self) {
        self.accel = None;
    }
}

/// One Störmer–Verlet step for the cubic wave equation.
pub fn nlw_step_leapfrog(s: &WaveState, dt: f64) -> Result<WaveState> {
    let mut out = s.clone();
    LeapfrogStepper::new(s.u.len(), s.u.box_length(), dt, WaveNonlinearity::CUBIC)?
        .step(&mut out)?;
    Ok(out)
}

/// `½∫u_x² + ½∫u_t² + ∫|u|^{2p+2}/(2p+2)`.
pub fn nlw_energy(s: &WaveState, nonlinearity: WaveNonlinearity) -> f64 {
    let ux = SpectralGrid::for_field(&s.u).derivative(&s.u);
    0.5 * box_integral(&ux, |c| c.norm_sqr())
        + 0.5 * box_integral(&s.v, |c| c.norm_sqr())
        + box_integral(&s.u, |c| nonlinearity.potential(c))
}

/// `sup_{t <= T} |u(t, x0) - v(t, x0)|` where `v` starts from the data
/// multiplied by `χ((x - x0)/T)`. Needs `L > 3T` so the truncated data
/// cannot reach `x0` around the torus.
pub fn nlw_cone_test(
    u0: &GridField,
    u1: &GridField,
    x0: f64,
    t_end: f64,
    dt: f64,
    nonlinearity: WaveNonlinearity,
) -> Result<f64> {
    if !(t_end > 0.0) {
        return Err(Error::invalid("T", format!("must be > 0, got {t_end}")));
    }
    if u0.box_length() <= 3.0 * t_end {
        return Err(Error::invalid(
            "box_length",
            format!("must exceed 3T = {}", 3.0 * t_end),
        ));
    }
    let full = WaveState::new(u0.clone(), u1.clone())?;
    let cut = |f: &GridField| {
        let mut g = f.clone();
        for (j, v) in g.values_mut().iter_mut().enumerate() {
            *v *= chi((f.x(j) - x0) / t_end);
        }
        g
    };
    let trunc = WaveState::new(cut(u0), cut(u1))?;
    let steps = (t_end / dt).round() as usize;
    let idx = u0.nearest_index(x0);
    let mut a = LeapfrogStepper::new(u0.len(), u0.box_length(), dt, nonlinearity)?;
    let mut b = a.clone();
    let (mut sa, mut sb) = (full, trunc);
    let mut worst = (sa.u.values()[idx] - sb.u.values()[idx]).norm();
    for _ in 0..steps {
        a.step(&mut sa)?;
        b.step(&mut sb)?;
        worst = worst.max((sa.u.values()[idx] - sb.u.values()[idx]).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_initial_grid, CombCoefficients, InitialData};
    use std::f64::consts::PI;

    fn real_comb(m: usize, l: f64, seed: u64, amplitude: f64) -> GridField {
        let spec = InitialData::GaussianComb {
            amplitude,
            coefficients: CombCoefficients::RandomReal { seed },
        };
        make_initial_grid(&spec, m, l).unwrap()
    }

    #[test]
    fn zero_state_stays_zero() {
        let s = WaveState::at_rest(GridField::zeros(64, 16.0).unwrap());
        let out = nlw_step_leapfrog(&s, 0.1).unwrap();
        assert_eq!(out.u.sup_abs(), 0.0);
        assert_eq!(out.v.sup_abs(), 0.0);
        assert_eq!(nlw_energy(&out, WaveNonlinearity::CUBIC), 0.0);
    }

    #[test]
    fn cfl_violation() {
        let s = WaveState::at_rest(GridField::zeros(64, 16.0).unwrap());
        assert!(matches!(nlw_step_leapfrog(&s, 0.3), Err(Error::Cfl { .. })));
    }

    #[test]
    fn linear_standing_wave_second_order() {
        let l = 2.0 * PI;
        let k = 3.0;
        let err = |dt: f64| {
            let u = GridField::from_fn(32, l, |x| Complex64::new((k * x).cos(), 0.0)).unwrap();
            let mut s = WaveState::at_rest(u);
            let t = 2.0;
            let n = (t / dt).round() as usize;
            LeapfrogStepper::new(32, l, dt, WaveNonlinearity::Linear)
                .unwrap()
                .advance(&mut s, n)
                .unwrap();
            let exact = GridField::from_fn(32, l, |x| {
                Complex64::new((k * x).cos() * (k * t).cos(), 0.0)
            })
            .unwrap();
            s.u.sup_distance(&exact)
        };
        let (e1, e2) = (err(0.01), err(0.005));
        assert!(e1 < 1e-3);
        let order = (e1 / e2).log2();
        assert!((order - 2.0).abs() < 0.1, "order {order}");
    }

    #[test]
    fn energy_nearly_conserved() {
        let u = real_comb(512, 32.0, 3, 0.8);
        let mut s = WaveState::at_rest(u);
        let e0 = nlw_energy(&s, WaveNonlinearity::CUBIC);
        let dt = 1.0 / 256.0;
        LeapfrogStepper::new(512, 32.0, dt, WaveNonlinearity::CUBIC)
            .unwrap()
            .advance(&mut s, 2560)
            .unwrap();
        let drift = ((nlw_energy(&s, WaveNonlinearity::CUBIC) - e0) / e0).abs();
        assert!(drift < 1e-5, "drift {drift}");
    }

    #[test]
    fn cone_examples() {
        let z = GridField::zeros(256, 64.0).unwrap();
        assert_eq!(
            nlw_cone_test(&z, &z, 0.0, 10.0, 0.05, WaveNonlinearity::CUBIC).unwrap(),
            0.0
        );
        // data supported inside the plateau of the cutoff
        let bump = GridField::from_fn(256, 64.0, |x| Complex64::new((-x * x).exp(), 0.0)).unwrap();
        let d = nlw_cone_test(&bump, &z, 0.0, 10.0, 0.05, WaveNonlinearity::CUBIC).unwrap();
        assert!(d < 1e-13, "{d}");
        assert!(nlw_cone_test(&bump, &z, 0.0, 30.0, 0.05, WaveNonlinearity::CUBIC).is_err());
    }
}
