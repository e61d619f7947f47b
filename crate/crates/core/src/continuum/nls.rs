use num_complex::Complex64;

use super::spectral::{box_integral, SpectralGrid};
use crate::error::{Error, Result};
use crate::field::{CombSeq, Coupling, GridField, Mollifier};

/// `i u_t + u_xx = s φ∗(|φ∗u|² φ∗u)` on a periodic box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumModel {
    pub mollifier: Mollifier,
    pub box_length: f64,
    pub grid_size: usize,
    pub dt: f64,
    pub coupling: Coupling,
}

impl ContinuumModel {
    pub fn new(
        mollifier: Mollifier,
        box_length: f64,
        grid_size: usize,
        dt: f64,
        coupling: Coupling,
    ) -> Result<Self> {
        if grid_size < 8 || !grid_size.is_power_of_two() {
            return Err(Error::invalid(
                "grid_size",
                format!("{grid_size} is not a power of two >= 8"),
            ));
        }
        if !(box_length > 0.0 && box_length.is_finite()) {
            return Err(Error::invalid("box_length", "must be positive and finite"));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid("dt", format!("must be > 0, got {dt}")));
        }
        Ok(Self {
            mollifier,
            box_length,
            grid_size,
            dt,
            coupling,
        })
    }

    /// Sharp cutoff at `K = Mπ/(2L)`, half the grid Nyquist wavenumber.
    pub fn default_cutoff(box_length: f64, grid_size: usize) -> Mollifier {
        Mollifier::FourierCutoff {
            k: grid_size as f64 * std::f64::consts::PI / (2.0 * box_length),
        }
    }

    pub fn grid(&self) -> SpectralGrid {
        SpectralGrid::new(self.grid_size, self.box_length).expect("validated model")
    }

    fn check(&self, u: &GridField) -> Result<()> {
        if u.len() != self.grid_size || u.box_length() != self.box_length {
            return Err(Error::GridMismatch(format!(
                "field has {} points on L = {}, model has {} on L = {}",
                u.len(),
                u.box_length(),
                self.grid_size,
                self.box_length
            )));
        }
        Ok(())
    }
}

/// Spectral multiplication by the mollifier transfer function.
pub fn mollify(u: &GridField, phi: &Mollifier) -> GridField {
    SpectralGrid::for_field(u).apply(u, |k| Complex64::new(phi.transfer(k), 0.0))
}

/// Mollified cubic term in Fourier space, 2/3-dealiased on both sides.
#[derive(Debug, Clone)]
pub(crate) struct Nonlinearity {
    grid: SpectralGrid,
    /// transfer × dealias mask
    gm: Vec<f64>,
    buf: Vec<Complex64>,
}

impl Nonlinearity {
    pub(crate) fn new(grid: SpectralGrid, phi: &Mollifier) -> Self {
        let gm = grid
            .wavenumbers()
            .iter()
            .zip(grid.dealias_mask())
            .map(|(&k, &keep)| if keep { phi.transfer(k) } else { 0.0 })
            .collect();
        let buf = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self { grid, gm, buf }
    }

    pub(crate) fn grid(&mut self) -> &mut SpectralGrid {
        &mut self.grid
    }

    /// Physical-space samples of `P φ∗u` from the DFT `u_hat`.
    pub(crate) fn smoothed(&mut self, u_hat: &[Complex64]) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = u_hat.iter().zip(&self.gm).map(|(c, g)| c * g).collect();
        self.grid.inverse(&mut v);
        v
    }

    /// `out = scale · DFT[N(u)]` given `u_hat = DFT[u]`.
    pub(crate) fn eval_hat(
        &mut self,
        u_hat: &[Complex64],
        scale: Complex64,
        out: &mut [Complex64],
    ) {
        for ((b, c), g) in self.buf.iter_mut().zip(u_hat).zip(&self.gm) {
            *b = c * g;
        }
        self.grid.inverse(&mut self.buf);
        for b in self.buf.iter_mut() {
            *b *= b.norm_sqr();
        }
        self.grid.forward(&mut self.buf);
        for ((o, b), g) in out.iter_mut().zip(&self.buf).zip(&self.gm) {
            *o = b * (scale * g);
        }
    }
}

/// `N(u) = φ∗(|φ∗u|² φ∗u)` with 2/3-rule dealiasing.
pub fn regularized_nonlinearity(u: &GridField, phi: &Mollifier) -> GridField {
    let mut nl = Nonlinearity::new(SpectralGrid::for_field(u), phi);
    let mut hat = u.values().to_vec();
    nl.grid().forward(&mut hat);
    let mut out = vec![Complex64::new(0.0, 0.0); u.len()];
    nl.eval_hat(&hat, Complex64::new(1.0, 0.0), &mut out);
    nl.grid().inverse(&mut out);
    GridField::from_raw(out, u.box_length())
}

/// Free flow `e^{itΔ}`: mode `k` picks up `e^{-ik²t}`.
pub fn linear_propagate(u0: &GridField, t: f64) -> GridField {
    SpectralGrid::for_field(u0).apply(u0, |k| Complex64::from_polar(1.0, -k * k * t))
}

/// Free evolution of `Σ_j a_j e^{-(x-j)²}` on the line:
/// `Σ_j a_j e^{-(x-j)²/(4it+1)} / (4it+1)^{1/2}` (principal root).
pub fn comb_oracle(a: &CombSeq, t: f64, x: f64) -> Complex64 {
    let w = Complex64::new(1.0, 4.0 * t);
    let inv_w = w.inv();
    let norm = w.sqrt().inv();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &c) in a.values.iter().enumerate() {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let d = x - (a.first + i as i64) as f64;
        acc += c * (-d * d * inv_w).exp();
    }
    acc * norm
}

/// Lawson (integrating factor) RK4 for the mollified NLS.
///
/// With `E = e^{hL/2}` and `f = -i s N`:
/// `k1 = f(u)`, `k2 = f(E(u + h/2 k1))`, `k3 = f(Eu + h/2 k2)`,
/// `k4 = f(E²u + h E k3)`, `u' = E²u + h/6 (E²k1 + 2E k2 + 2E k3 + k4)`.
#[derive(Debug, Clone)]
pub struct LawsonRk4 {
    model: ContinuumModel,
    nl: Nonlinearity,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
    scale: Complex64,
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
    steps: usize,
}

impl LawsonRk4 {
    pub fn new(model: ContinuumModel) -> Self {
        let grid = model.grid();
        let h = model.dt;
        let half: Vec<Complex64> = grid
            .wavenumbers()
            .iter()
            .map(|&k| Complex64::from_polar(1.0, -0.5 * k * k * h))
            .collect();
        let full = half.iter().map(|e| e * e).collect();
        let m = grid.len();
        let zero = vec![Complex64::new(0.0, 0.0); m];
        Self {
            scale: Complex64::new(0.0, -model.coupling.sign()),
            nl: Nonlinearity::new(grid, &model.mollifier),
            model,
            half,
            full,
            k: [zero.clone(), zero.clone(), zero.clone(), zero.clone()],
            tmp: zero,
            steps: 0,
        }
    }

    pub fn model(&self) -> &ContinuumModel {
        &self.model
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    fn step_hat(&mut self, u: &mut [Complex64]) -> Result<()> {
        let h = self.model.dt;
        if self.model.coupling == Coupling::Linear {
            for (c, e) in u.iter_mut().zip(&self.full) {
                *c *= e;
            }
            self.steps += 1;
            return Ok(());
        }
        let [k1, k2, k3, k4] = &mut self.k;
        self.nl.eval_hat(u, self.scale, k1);
        for i in 0..u.len() {
            self.tmp[i] = self.half[i] * (u[i] + 0.5 * h * k1[i]);
        }
        self.nl.eval_hat(&self.tmp, self.scale, k2);
        for i in 0..u.len() {
            self.tmp[i] = self.half[i] * u[i] + 0.5 * h * k2[i];
        }
        self.nl.eval_hat(&self.tmp, self.scale, k3);
        for i in 0..u.len() {
            self.tmp[i] = self.full[i] * u[i] + h * self.half[i] * k3[i];
        }
        self.nl.eval_hat(&self.tmp, self.scale, k4);
        let mut sup = 0.0f64;
        for i in 0..u.len() {
            let e = self.half[i];
            let e2 = self.full[i];
            u[i] = e2 * u[i] + (h / 6.0) * (e2 * k1[i] + 2.0 * e * (k2[i] + k3[i]) + k4[i]);
            sup = sup.max(u[i].norm_sqr());
        }
        self.steps += 1;
        if !sup.is_finite() {
            return Err(Error::NumericalAbort {
                step: self.steps,
                reason: "non-finite Fourier coefficient".into(),
            });
        }
        Ok(())
    }

    pub fn step(&mut self, u: &mut GridField) -> Result<()> {
        self.advance(u, 1)
    }

    /// `n` steps; the state stays in Fourier space in between.
    pub fn advance(&mut self, u: &mut GridField, n: usize) -> Result<()> {
        self.model.check(u)?;
        let v = u.values_mut();
        self.nl.grid().forward(v);
        let mut res = Ok(());
        for _ in 0..n {
            res = self.step_hat(v);
            if res.is_err() {
                break;
            }
        }
        self.nl.grid().inverse(v);
        res
    }
}

/// One Lawson-RK4 step of `u` under `model`.
pub fn step_lawson_rk4(u: &GridField, model: &ContinuumModel) -> Result<GridField> {
    let mut out = u.clone();
    LawsonRk4::new(*model).step(&mut out)?;
    Ok(out)
}

/// Snapshots `states[j]` at `times[j]` on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<GridField>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&GridField> {
        self.states.last()
    }

    /// `max_j sup_x |self_j - other_j|`.
    pub fn sup_distance(&self, other: &Trajectory) -> f64 {
        self.states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| a.sup_distance(b))
            .fold(0.0, f64::max)
    }
}

/// Integrate with Lawson RK4 and keep every `stride`-th state.
pub fn lawson_trajectory(
    u0: &GridField,
    model: &ContinuumModel,
    steps: usize,
    stride: usize,
) -> Result<Trajectory> {
    let stride = stride.max(1);
    let mut stepper = LawsonRk4::new(*model);
    let mut u = u0.clone();
    let mut times = vec![0.0];
    let mut states = vec![u.clone()];
    let mut done = 0;
    while done < steps {
        let n = stride.min(steps - done);
        stepper.advance(&mut u, n)?;
        done += n;
        times.push(done as f64 * model.dt);
        states.push(u.clone());
    }
    Ok(Trajectory { times, states })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardSolution {
    /// Applications of the Duhamel map until successive iterates agreed.
    pub iterations: usize,
    pub final_difference: f64,
    pub trajectory: Trajectory,
}

/// Iteration cap for [`picard_solve`].
pub const PICARD_MAX_ITER: usize = 60;

/// Fixed point of `Φ(u)(t) = e^{itΔ}u0 - i s ∫_0^t e^{i(t-τ)Δ} N(u(τ)) dτ`
/// on the time grid `t_j = j T/n`, `n = round(T/dt) >= 3`, starting from the
/// free evolution.
pub fn picard_solve(
    u0: &GridField,
    t_end: f64,
    model: &ContinuumModel,
    tol: f64,
) -> Result<PicardSolution> {
    model.check(u0)?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::invalid("T", format!("must be > 0, got {t_end}")));
    }
    let n = ((t_end / model.dt).round() as usize).max(3);
    let h = t_end / n as f64;
    let times: Vec<f64> = (0..=n).map(|j| j as f64 * h).collect();
    let mut nl = Nonlinearity::new(model.grid(), &model.mollifier);
    let k2: Vec<f64> = nl.grid().wavenumbers().iter().map(|k| k * k).collect();
    let m = k2.len();
    let scale = Complex64::new(0.0, -model.coupling.sign());

    let mut u0_hat = u0.values().to_vec();
    nl.grid().forward(&mut u0_hat);
    let propagate = |hat: &[Complex64], t: f64, sign: f64| -> Vec<Complex64> {
        hat.iter()
            .zip(&k2)
            .map(|(c, k)| c * Complex64::from_polar(1.0, -sign * k * t))
            .collect()
    };
    let mut hats: Vec<Vec<Complex64>> = times.iter().map(|&t| propagate(&u0_hat, t, 1.0)).collect();
    let to_phys = |nl: &mut Nonlinearity, hat: &[Complex64]| {
        let mut v = hat.to_vec();
        nl.grid().inverse(&mut v);
        v
    };
    let mut phys: Vec<Vec<Complex64>> = hats.iter().map(|h| to_phys(&mut nl, h)).collect();

    let mut f = vec![vec![Complex64::new(0.0, 0.0); m]; n + 1];
    let mut prev_diff = f64::INFINITY;
    let mut growth = 0;
    for iter in 1..=PICARD_MAX_ITER {
        // interaction-picture integrand e^{-iτΔ}(-i s N(u(τ)))
        for (j, fj) in f.iter_mut().enumerate() {
            nl.eval_hat(&hats[j], scale, fj);
            for (v, k) in fj.iter_mut().zip(&k2) {
                *v *= Complex64::from_polar(1.0, k * times[j]);
            }
        }
        let mut acc = vec![Complex64::new(0.0, 0.0); m];
        let mut diff = 0.0f64;
        for j in 0..=n {
            if j > 0 {
                let w = interval_weights(j - 1, n);
                for (i, a) in acc.iter_mut().enumerate() {
                    *a += (h / 24.0)
                        * (w.1[0] * f[w.0][i]
                            + w.1[1] * f[w.0 + 1][i]
                            + w.1[2] * f[w.0 + 2][i]
                            + w.1[3] * f[w.0 + 3][i]);
                }
            }
            let total: Vec<Complex64> = u0_hat.iter().zip(&acc).map(|(a, b)| a + b).collect();
            hats[j] = propagate(&total, times[j], 1.0);
            let new = to_phys(&mut nl, &hats[j]);
            for (a, b) in new.iter().zip(&phys[j]) {
                diff = diff.max((a - b).norm());
            }
            phys[j] = new;
        }
        if !diff.is_finite() {
            return Err(Error::PicardDiverged {
                iterations: iter,
                difference: diff,
            });
        }
        if diff <= tol {
            let states = phys
                .into_iter()
                .map(|v| GridField::from_raw(v, model.box_length))
                .collect();
            return Ok(PicardSolution {
                iterations: iter,
                final_difference: diff,
                trajectory: Trajectory { times, states },
            });
        }
        if diff > prev_diff {
            growth += 1;
            if growth >= 2 {
                return Err(Error::PicardDiverged {
                    iterations: iter,
                    difference: diff,
                });
            }
        } else {
            growth = 0;
        }
        prev_diff = diff;
    }
    Err(Error::PicardDiverged {
        iterations: PICARD_MAX_ITER,
        difference: prev_diff,
    })
}

/// Fourth-order weights (in units of h/24) for `∫_{t_j}^{t_{j+1}}` from four
/// neighbouring samples; returns the first sample index and the weights.
pub(crate) fn interval_weights(j: usize, n: usize) -> (usize, [f64; 4]) {
    if j == 0 {
        (0, [9.0, 19.0, -5.0, 1.0])
    } else if j + 1 == n {
        (n - 3, [1.0, -5.0, 19.0, 9.0])
    } else {
        (j - 1, [-1.0, 13.0, 13.0, -1.0])
    }
}

/// `M(u) = ∫ |u|²`.
pub fn global_mass(u: &GridField) -> f64 {
    box_integral(u, |v| v.norm_sqr())
}

/// `E(u) = ½∫|u_x|² + ¼∫|φ∗u|⁴` (defocusing sign).
pub fn global_energy(u: &GridField, phi: &Mollifier) -> f64 {
    global_energy_signed(u, phi, Coupling::Defocusing)
}

/// `½∫|u_x|² + (s/4)∫|φ∗u|⁴`; the quartic term uses the dealiased `φ∗u`
/// seen by the time stepper.
pub fn global_energy_signed(u: &GridField, phi: &Mollifier, coupling: Coupling) -> f64 {
    let mut nl = Nonlinearity::new(SpectralGrid::for_field(u), phi);
    let ux = nl.grid().derivative(u);
    let mut hat = u.values().to_vec();
    nl.grid().forward(&mut hat);
    let v = nl.smoothed(&hat);
    let h = u.spacing();
    let grad: f64 = ux.values().iter().map(|c| c.norm_sqr()).sum();
    let quart: f64 = v.iter().map(|c| c.norm_sqr() * c.norm_sqr()).sum();
    h * (0.5 * grad + 0.25 * coupling.sign() * quart)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_initial_grid, CombCoefficients, InitialData};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn plane(m: usize, l: f64, mode: i64, a: Complex64) -> (GridField, f64) {
        let k = 2.0 * PI * mode as f64 / l;
        (
            GridField::from_fn(m, l, |x| a * Complex64::from_polar(1.0, k * x)).unwrap(),
            k,
        )
    }

    fn band_limited(m: usize, l: f64, band: i64, seed: u64) -> GridField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modes: Vec<(f64, Complex64)> = (-band..=band)
            .map(|q| {
                (
                    2.0 * PI * q as f64 / l,
                    Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
                )
            })
            .collect();
        GridField::from_fn(m, l, |x| {
            modes
                .iter()
                .map(|(k, c)| c * Complex64::from_polar(1.0, k * x))
                .sum()
        })
        .unwrap()
    }

    fn comb_model(dt: f64, coupling: Coupling) -> (GridField, ContinuumModel) {
        let spec = InitialData::GaussianComb {
            amplitude: 0.5,
            coefficients: CombCoefficients::RandomPhase { seed: 4 },
        };
        let u = make_initial_grid(&spec, 128, 32.0).unwrap();
        let model = ContinuumModel::new(Mollifier::gaussian(1.0).unwrap(), 32.0, 128, dt, coupling)
            .unwrap();
        (u, model)
    }

    #[test]
    fn mollify_examples() {
        let (u, k) = plane(64, 10.0, 3, Complex64::new(0.7, 0.2));
        let g = Mollifier::gaussian(0.8).unwrap();
        let out = mollify(&u, &g);
        for (a, b) in out.values().iter().zip(u.values()) {
            assert!((a - g.transfer(k) * b).norm() < 1e-13);
        }
        let w = band_limited(64, 10.0, 5, 1);
        let cut = Mollifier::fourier_cutoff(2.0 * PI * 6.0 / 10.0).unwrap();
        assert!(mollify(&w, &cut).sup_distance(&w) < 1e-13);
        let c = GridField::from_fn(64, 10.0, |_| Complex64::new(1.5, 0.0)).unwrap();
        assert!(mollify(&c, &g).sup_distance(&c) < 1e-14);
    }

    #[test]
    fn nonlinearity_examples() {
        let g = Mollifier::gaussian(0.5).unwrap();
        let z = GridField::zeros(32, 4.0).unwrap();
        assert_eq!(regularized_nonlinearity(&z, &g).sup_abs(), 0.0);

        let a = Complex64::new(0.6, -0.3);
        let (u, k) = plane(64, 2.0 * PI, 4, a);
        let out = regularized_nonlinearity(&u, &g);
        let gk = g.transfer(k);
        let factor = gk.powi(4) * a.norm_sqr();
        for (o, v) in out.values().iter().zip(u.values()) {
            assert!((o - factor * v).norm() < 1e-14);
        }

        // identity mollifier: plain cubic when 3 × band stays inside the 2/3 window
        let w = band_limited(128, 2.0 * PI, 12, 7);
        let out = regularized_nonlinearity(&w, &Mollifier::identity());
        for (o, v) in out.values().iter().zip(w.values()) {
            assert!((o - v * v.norm_sqr()).norm() < 1e-10);
        }
    }

    #[test]
    fn propagate_examples() {
        let (u, k) = plane(64, 6.0, -2, Complex64::new(1.0, 0.0));
        let out = linear_propagate(&u, 0.7);
        let ph = Complex64::from_polar(1.0, -k * k * 0.7);
        for (o, v) in out.values().iter().zip(u.values()) {
            assert!((o - ph * v).norm() < 1e-13);
        }
        let w = band_limited(64, 6.0, 10, 3);
        assert!(linear_propagate(&w, 0.0).sup_distance(&w) < 1e-14);
    }

    #[test]
    fn comb_oracle_examples() {
        let a = CombSeq::new(
            -3,
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(-0.5, 0.5),
                Complex64::new(0.3, 0.0),
            ],
        );
        for &x in &[-2.3, 0.0, 0.4] {
            let d = comb_oracle(&a, 0.0, x) - crate::field::gaussian_comb_eval(&a, x);
            assert!(d.norm() < 1e-15);
        }
        let one = CombSeq::new(0, vec![Complex64::new(1.0, 0.0)]);
        for &t in &[0.1, 1.0, 7.0] {
            let v = comb_oracle(&one, t, 0.0);
            assert!((v.norm() - (1.0 + 16.0 * t * t).powf(-0.25)).abs() < 1e-15);
        }
        // a ≡ 1, wide window summation
        let ones = CombSeq::new(-1000, vec![Complex64::new(1.0, 0.0); 2001]);
        let v = comb_oracle(&ones, 10.0, 0.0);
        assert!((v.re - 1.772_544_047_062_770_9).abs() < 1e-12);
        assert!((v.im - 0.000_159_634_938_570_557_09).abs() < 1e-12);
    }

    #[test]
    fn spectral_propagator_matches_comb_closed_form() {
        let a = CombSeq::new(
            -6,
            (0..13)
                .map(|j| Complex64::from_polar(1.0, 0.7 * j as f64))
                .collect(),
        );
        let spec = InitialData::GaussianComb {
            amplitude: 1.0,
            coefficients: CombCoefficients::Explicit(a.clone()),
        };
        let u0 = make_initial_grid(&spec, 512, 128.0).unwrap();
        for &t in &[0.5, 2.0] {
            let u = linear_propagate(&u0, t);
            let err = (0..u.len())
                .map(|j| (u.values()[j] - comb_oracle(&a, t, u.x(j))).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-8, "t={t} err={err}");
        }
    }

    #[test]
    fn lawson_linear_is_exact() {
        let (u, mut model) = comb_model(0.05, Coupling::Linear);
        model.dt = 0.05;
        let mut v = u.clone();
        LawsonRk4::new(model).advance(&mut v, 20).unwrap();
        assert!(v.sup_distance(&linear_propagate(&u, 1.0)) < 1e-12);
        let z = GridField::zeros(128, 32.0).unwrap();
        assert_eq!(step_lawson_rk4(&z, &model).unwrap().sup_abs(), 0.0);
    }

    #[test]
    fn lawson_fourth_order() {
        let run = |dt: f64| {
            let (mut u, model) = comb_model(dt, Coupling::Defocusing);
            let n = (1.0 / dt).round() as usize;
            LawsonRk4::new(model).advance(&mut u, n).unwrap();
            u
        };
        let reference = run(1.0 / 640.0);
        let e1 = run(0.1).sup_distance(&reference);
        let e2 = run(0.05).sup_distance(&reference);
        assert!(e1 / e2 >= 12.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn conservation_short_run() {
        let (mut u, model) = comb_model(0.01, Coupling::Defocusing);
        let m0 = global_mass(&u);
        let e0 = global_energy(&u, &model.mollifier);
        LawsonRk4::new(model).advance(&mut u, 200).unwrap();
        assert!(((global_mass(&u) - m0) / m0).abs() < 1e-8);
        assert!(((global_energy(&u, &model.mollifier) - e0) / e0).abs() < 1e-6);
    }

    #[test]
    fn mass_energy_examples() {
        let a = Complex64::new(0.8, 0.1);
        let l = 2.0 * PI * 2.0;
        let (u, k) = plane(64, l, 3, a);
        let g = Mollifier::gaussian(0.3).unwrap();
        assert!((global_mass(&u) - a.norm_sqr() * l).abs() < 1e-12);
        let expect = 0.5 * k * k * a.norm_sqr() * l
            + 0.25 * g.transfer(k).powi(4) * a.norm_sqr().powi(2) * l;
        assert!((global_energy(&u, &g) - expect).abs() < 1e-12);
        let z = GridField::zeros(16, 1.0).unwrap();
        assert_eq!(global_mass(&z), 0.0);
        assert_eq!(global_energy(&z, &g), 0.0);
        let w = band_limited(64, 5.0, 9, 11);
        let parseval: f64 = crate::field::SpectralField::from_grid(&w)
            .coeffs()
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            * 5.0;
        assert!((global_mass(&w) - parseval).abs() < 1e-12 * parseval);
    }

    #[test]
    fn picard_examples() {
        let (u0, model) = comb_model(1e-3, Coupling::Defocusing);
        let z = GridField::zeros(128, 32.0).unwrap();
        let s = picard_solve(&z, 0.1, &model, 1e-8).unwrap();
        assert_eq!(s.iterations, 1);
        assert_eq!(s.trajectory.last().unwrap().sup_abs(), 0.0);

        let lin = ContinuumModel {
            coupling: Coupling::Linear,
            ..model
        };
        let s = picard_solve(&u0, 0.1, &lin, 1e-12).unwrap();
        assert_eq!(s.iterations, 1);
        assert!(
            s.trajectory
                .last()
                .unwrap()
                .sup_distance(&linear_propagate(&u0, 0.1))
                < 1e-12
        );

        let s = picard_solve(&u0, 0.1, &model, 1e-8).unwrap();
        assert!(s.iterations <= 8, "{}", s.iterations);
        let rk = lawson_trajectory(&u0, &model, 100, 1).unwrap();
        assert_eq!(rk.len(), s.trajectory.len());
        assert!(rk.sup_distance(&s.trajectory) < 1e-6);
    }

    #[test]
    fn picard_reports_divergence() {
        let spec = InitialData::Constant { amplitude: 6.0 };
        let u0 = make_initial_grid(&spec, 16, 4.0).unwrap();
        let model =
            ContinuumModel::new(Mollifier::identity(), 4.0, 16, 0.01, Coupling::Focusing).unwrap();
        let u0 = {
            let mut v = u0;
            v.values_mut()[3] += Complex64::new(3.0, 0.0);
            v
        };
        assert!(matches!(
            picard_solve(&u0, 2.0, &model, 1e-10),
            Err(Error::PicardDiverged { .. })
        ));
    }

    #[test]
    fn quadrature_weights_integrate_cubics() {
        let n = 7;
        let h = 0.3;
        let f = |t: f64| 1.0 - 2.0 * t + 0.5 * t * t - 0.7 * t * t * t;
        let fi = |t: f64| t - t * t + t.powi(3) / 6.0 - 0.175 * t.powi(4);
        for j in 0..n {
            let (s, w) = interval_weights(j, n);
            let q: f64 = (0..4).map(|i| w[i] * f((s + i) as f64 * h)).sum::<f64>() * h / 24.0;
            let exact = fi((j + 1) as f64 * h) - fi(j as f64 * h);
            assert!((q - exact).abs() < 1e-14, "j={j}");
        }
    }
}
