//! Lattice NLS `i ψ̇ = -Δψ + s |ψ|^p ψ` on a periodically wrapped truncation of ℤ,
//! plus the weighted local mass/energy diagnostics.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Coupling, Fourier, LatticeField, WeightProfile};

/// Parameters of a lattice run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeModel {
    pub coupling: Coupling,
    /// Exponent in `|ψ|^p ψ`; the cubic equation is `p = 2`.
    pub p: f64,
    pub extent: usize,
    pub dt: f64,
}

impl LatticeModel {
    pub fn new(coupling: Coupling, p: f64, extent: usize, dt: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::invalid("p", format!("must be >= 1, got {p}")));
        }
        if extent < 1 {
            return Err(Error::invalid("extent", "must be >= 1"));
        }
        if !(dt > 0.0 && dt <= 0.1) {
            return Err(Error::invalid(
                "dt",
                format!("must lie in (0, 0.1], got {dt}"),
            ));
        }
        Ok(Self {
            coupling,
            p,
            extent,
            dt,
        })
    }

    /// Cubic defocusing model with the default step 0.01.
    pub fn cubic(extent: usize) -> Self {
        Self {
            coupling: Coupling::Defocusing,
            p: 2.0,
            extent,
            dt: 0.01,
        }
    }
}

/// Smallest extent keeping a signal of the given support radius away from the
/// wrap-around seam up to `horizon` (group speed of the lattice is at most 2).
pub fn required_extent(support_radius: usize, horizon: f64) -> usize {
    support_radius + (2.0 * horizon).ceil() as usize + 64
}

/// Warning text when `extent` is below [`required_extent`].
pub fn wrap_margin_warning(extent: usize, support_radius: usize, horizon: f64) -> Option<String> {
    let need = required_extent(support_radius, horizon);
    (extent < need).then(|| {
        format!(
            "lattice extent {extent} below wrap-safe extent {need} for support radius {support_radius} and horizon {horizon}"
        )
    })
}

/// Strang split-step integrator. The linear substep is exact in the DFT
/// basis of the wrapped lattice, the nonlinear substep is an exact phase
/// rotation, so every substep is an isometry of ℓ².
#[derive(Debug, Clone)]
pub struct SplitStep {
    model: LatticeModel,
    fourier: Fourier,
    /// `(e^{-4 i dt sin²(κ/2)} - 1) / len` per DFT mode. The step adds the
    /// transformed increment to `ψ`, so FFT rounding only touches the small
    /// part of the update and does not drift the mass.
    increment: Vec<Complex64>,
    scratch: Vec<Complex64>,
    steps: usize,
}

impl SplitStep {
    pub fn new(model: LatticeModel) -> Self {
        let len = 2 * model.extent + 1;
        let increment = (0..len)
            .map(|m| {
                let kappa = 2.0 * std::f64::consts::PI * m as f64 / len as f64;
                let s = (0.5 * kappa).sin();
                expm1_i(-4.0 * model.dt * s * s) / len as f64
            })
            .collect();
        Self {
            model,
            fourier: Fourier::new(len),
            increment,
            scratch: vec![Complex64::new(0.0, 0.0); len],
            steps: 0,
        }
    }

    pub fn model(&self) -> &LatticeModel {
        &self.model
    }

    fn rotate(&self, psi: &mut [Complex64], tau: f64) -> Result<()> {
        let g = self.model.coupling.sign();
        if g == 0.0 {
            return Ok(());
        }
        let p = self.model.p;
        let mut sup = 0.0f64;
        for v in psi.iter_mut() {
            let a2 = v.norm_sqr();
            sup = sup.max(a2);
            let amp_p = if p == 2.0 { a2 } else { a2.powf(0.5 * p) };
            *v *= Complex64::from_polar(1.0, -g * amp_p * tau);
        }
        if !sup.is_finite() {
            return Err(Error::NumericalAbort {
                step: self.steps,
                reason: "non-finite amplitude".into(),
            });
        }
        Ok(())
    }

    fn linear(&mut self, psi: &mut [Complex64]) {
        let w = &mut self.scratch;
        w.copy_from_slice(psi);
        self.fourier.forward(w);
        for (v, e) in w.iter_mut().zip(&self.increment) {
            *v *= e;
        }
        self.fourier.inverse_unscaled(w);
        for (v, d) in psi.iter_mut().zip(w.iter()) {
            *v += d;
        }
    }

    /// One Strang step: half rotation, exact linear step, half rotation.
    pub fn step(&mut self, psi: &mut LatticeField) -> Result<()> {
        self.check(psi)?;
        let dt = self.model.dt;
        let v = psi.values_mut();
        self.rotate(v, 0.5 * dt)?;
        self.linear(v);
        self.rotate(v, 0.5 * dt)?;
        self.steps += 1;
        Ok(())
    }

    /// `n` Strang steps with adjacent half rotations fused.
    pub fn advance(&mut self, psi: &mut LatticeField, n: usize) -> Result<()> {
        if n == 0 {
            return Ok(());
        }
        self.check(psi)?;
        let dt = self.model.dt;
        let v = psi.values_mut();
        self.rotate(v, 0.5 * dt)?;
        for i in 0..n {
            self.linear(v);
            self.steps += 1;
            let tau = if i + 1 == n { 0.5 * dt } else { dt };
            self.rotate(v, tau)?;
        }
        Ok(())
    }

    fn check(&self, psi: &LatticeField) -> Result<()> {
        if psi.extent() != self.model.extent {
            return Err(Error::invalid(
                "extent",
                format!(
                    "field extent {} != model extent {}",
                    psi.extent(),
                    self.model.extent
                ),
            ));
        }
        Ok(())
    }
}

/// `e^{iθ} - 1` without cancellation for small `θ`.
fn expm1_i(theta: f64) -> Complex64 {
    let h = (0.5 * theta).sin();
    Complex64::new(-2.0 * h * h, theta.sin())
}

/// One split step of `psi` under `model`.
pub fn step_splitstep(psi: &LatticeField, model: &LatticeModel) -> Result<LatticeField> {
    let mut out = psi.clone();
    SplitStep::new(*model).step(&mut out)?;
    Ok(out)
}

/// `(∂f)(x) = f(x+1) - f(x)` with periodic wrap of the truncated lattice.
pub fn forward_diff(f: &LatticeField) -> LatticeField {
    let v = f.values();
    let n = v.len();
    let out = (0..n).map(|i| v[(i + 1) % n] - v[i]).collect();
    LatticeField::from_values(f.extent(), out).expect("same layout")
}

/// `(Δf)(x) = f(x+1) + f(x-1) - 2 f(x)` with periodic wrap.
pub fn lattice_laplacian(f: &LatticeField) -> LatticeField {
    let v = f.values();
    let n = v.len();
    let out = (0..n)
        .map(|i| v[(i + 1) % n] + v[(i + n - 1) % n] - 2.0 * v[i])
        .collect();
    LatticeField::from_values(f.extent(), out).expect("same layout")
}

/// `Σ |ψ|²`.
pub fn global_mass(psi: &LatticeField) -> f64 {
    psi.mass()
}

/// Hamiltonian `½ Σ |∂ψ|² + s/(p+2) Σ |ψ|^{p+2}`.
pub fn global_energy(psi: &LatticeField, model: &LatticeModel) -> f64 {
    let v = psi.values();
    let n = v.len();
    let g = model.coupling.sign();
    let p = model.p;
    let mut kin = 0.0;
    let mut pot = 0.0;
    for i in 0..n {
        kin += (v[(i + 1) % n] - v[i]).norm_sqr();
        pot += v[i].norm().powf(p + 2.0);
    }
    0.5 * kin + g / (p + 2.0) * pot
}

/// `M(t) = Σ_x |ψ(x)|² e^{-F(t,x)}`.
pub fn local_mass(psi: &LatticeField, w: &WeightProfile, t: f64) -> Result<f64> {
    w.check_time(t)?;
    Ok(psi
        .sites()
        .map(|(x, v)| v.norm_sqr() * (-w.eval_unchecked(t, x)).exp())
        .sum())
}

/// `E(t) = ½ Σ |ψ(x+1) - ψ(x)|² e^{-F} + ¼ Σ |ψ(x)|⁴ e^{-F}`.
///
/// Positive definite only for the defocusing sign; callers running focusing
/// models get the same functional but it no longer bounds anything.
pub fn local_energy(psi: &LatticeField, w: &WeightProfile, t: f64) -> Result<f64> {
    w.check_time(t)?;
    let v = psi.values();
    let n = v.len();
    let mut acc = 0.0;
    for (i, (x, val)) in psi.sites().enumerate() {
        let weight = (-w.eval_unchecked(t, x)).exp();
        let grad = (v[(i + 1) % n] - val).norm_sqr();
        let a2 = val.norm_sqr();
        acc += (0.5 * grad + 0.25 * a2 * a2) * weight;
    }
    Ok(acc)
}

fn window_sum(
    psi: &LatticeField,
    x0: i64,
    t0: f64,
    density: impl Fn(Complex64) -> f64,
) -> Result<f64> {
    if !(t0 >= 1.0) {
        return Err(Error::invalid("t0", format!("must be >= 1, got {t0}")));
    }
    let half = t0.floor() as i64;
    let n = psi.extent() as i64;
    if x0 - half < -n || x0 + half > n {
        return Err(Error::WindowExceedsLattice {
            center: x0,
            half_width: half,
            extent: psi.extent(),
        });
    }
    let s: f64 = (x0 - half..=x0 + half)
        .map(|x| density(psi.get(x).expect("inside window")))
        .sum();
    Ok(s / t0)
}

/// `(1/t0) Σ_{|x-x0| <= t0} |ψ(x)|²`.
pub fn windowed_mass_avg(psi: &LatticeField, x0: i64, t0: f64) -> Result<f64> {
    window_sum(psi, x0, t0, |v| v.norm_sqr())
}

/// `(1/t0) Σ_{|x-x0| <= t0} |ψ(x)|⁴`.
pub fn windowed_quartic_avg(psi: &LatticeField, x0: i64, t0: f64) -> Result<f64> {
    window_sum(psi, x0, t0, |v| v.norm_sqr() * v.norm_sqr())
}

/// `sup_x |Δψ - s |ψ|^p ψ|`, the modulus of the right-hand side of the equation.
pub fn sup_time_derivative(psi: &LatticeField, model: &LatticeModel) -> f64 {
    let lap = lattice_laplacian(psi);
    let g = model.coupling.sign();
    lap.values()
        .iter()
        .zip(psi.values())
        .map(|(l, v)| (l - g * v.norm().powf(model.p) * v).norm())
        .fold(0.0, f64::max)
}

/// Per-sample diagnostics of a lattice run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeRunRecord {
    pub t: f64,
    pub sup_abs: f64,
    pub global_mass: f64,
    pub global_energy: f64,
    pub local_mass: f64,
    pub local_energy: f64,
    pub sup_dt: f64,
}

impl LatticeRunRecord {
    pub fn measure(
        psi: &LatticeField,
        model: &LatticeModel,
        weight: &WeightProfile,
        t: f64,
    ) -> Result<Self> {
        Ok(Self {
            t,
            sup_abs: psi.sup_abs(),
            global_mass: global_mass(psi),
            global_energy: global_energy(psi, model),
            local_mass: local_mass(psi, weight, t)?,
            local_energy: local_energy(psi, weight, t)?,
            sup_dt: sup_time_derivative(psi, model),
        })
    }
}

/// Evolves `psi` from `t = 0`, recording at each of `times` (non-decreasing,
/// rounded to the nearest step).
pub fn run(
    psi: &mut LatticeField,
    model: &LatticeModel,
    weight: &WeightProfile,
    times: &[f64],
) -> Result<Vec<LatticeRunRecord>> {
    let mut stepper = SplitStep::new(*model);
    let mut done = 0usize;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let target = (t / model.dt).round() as usize;
        if target < done {
            return Err(Error::invalid(
                "times",
                "sample times must be non-decreasing",
            ));
        }
        stepper.advance(psi, target - done)?;
        done = target;
        let tt = done as f64 * model.dt;
        out.push(LatticeRunRecord::measure(
            psi,
            model,
            weight,
            tt.min(weight.t0()),
        )?);
    }
    Ok(out)
}
