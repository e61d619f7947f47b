use num_complex::Complex64;

use super::linearized::{solve_linearized, LinearizedSystem};
use super::norm::{majorant_norm, AnalyticNormParams, RadiusSchedule};
use crate::continuum::{linear_propagate, SpectralGrid, Trajectory};
use crate::error::{Error, Result};
use crate::field::GridField;

/// Free evolution `e^{itΔ}ψ0` at `t_j = jT/steps`.
pub fn free_trajectory(psi0: &GridField, t_end: f64, steps: usize) -> Trajectory {
    let times: Vec<f64> = (0..=steps)
        .map(|j| j as f64 * t_end / steps as f64)
        .collect();
    let states = times.iter().map(|&t| linear_propagate(psi0, t)).collect();
    Trajectory { times, states }
}

fn pointwise(
    a: &Trajectory,
    b: &Trajectory,
    f: impl Fn(Complex64, Complex64) -> Complex64,
) -> Result<Trajectory> {
    if a.times != b.times {
        return Err(Error::invalid("trajectory", "sample times differ"));
    }
    let states = a
        .states
        .iter()
        .zip(&b.states)
        .map(|(x, y)| {
            if !x.same_grid(y) {
                return Err(Error::GridMismatch("trajectory grids differ".into()));
            }
            let v = x
                .values()
                .iter()
                .zip(y.values())
                .map(|(&p, &q)| f(p, q))
                .collect();
            Ok(GridField::from_raw(v, x.box_length()))
        })
        .collect::<Result<_>>()?;
    Ok(Trajectory {
        times: a.times.clone(),
        states,
    })
}

/// `R_1 = |ψ_1|² ψ_1`.
pub fn first_residual(psi1: &Trajectory) -> Trajectory {
    pointwise(psi1, psi1, |p, _| p * p.norm_sqr()).expect("same trajectory")
}

/// `R = 2|ξ|² ψ + ξ² ψ̄ + |ξ|² ξ`: what is left over when `ψ + ξ` replaces `ψ`.
pub fn residual(psi_prev: &Trajectory, xi: &Trajectory) -> Result<Trajectory> {
    pointwise(psi_prev, xi, |p, x| {
        2.0 * x.norm_sqr() * p + x * x * p.conj() + x.norm_sqr() * x
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// RK4 steps (and stored samples) over `[0, T]`.
    pub steps: usize,
    pub max_iter: usize,
    /// Stop once `sup |R_n| <= tol`.
    pub tol: f64,
    /// Solve for `λψ0(λx)` on `[0, T/λ²]` and map back; `1` leaves the data alone.
    pub scale: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            steps: 300,
            max_iter: 5,
            tol: 1e-10,
            scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonRow {
    pub n: usize,
    /// `sup_t` majorant of `ξ_n(t)` at radius `r_n`.
    pub eps: f64,
    /// `sup_{t,x} |R|` for the residual left by `ψ_n`.
    pub sup_residual: f64,
    /// `ε_n / ε_{n-1}²`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonReport {
    pub rows: Vec<NewtonRow>,
    pub scale: f64,
    pub converged: bool,
    /// `max_n sup_x |ξ_n(0, x)|`.
    pub initial_defect: f64,
    /// `max_n` of the conjugate-mirror defect of the linearized solutions.
    pub conjugation_defect: f64,
}

/// Iterate `n` with `ψ_n = Σ_{m<=n} ξ_m` and the residual it leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonState {
    pub n: usize,
    pub psi: Trajectory,
    pub xi: Trajectory,
    pub eps: f64,
    pub residual: Trajectory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonSolution {
    pub state: NewtonState,
    pub report: NewtonReport,
}

fn sup_majorant(tr: &Trajectory, r: f64) -> Result<f64> {
    let params = AnalyticNormParams::new(r, 0)?;
    tr.states
        .iter()
        .map(|s| majorant_norm(s, params))
        .try_fold(0.0f64, |acc, v| v.map(|v| acc.max(v)))
}

fn sup_traj(tr: &Trajectory) -> f64 {
    tr.states.iter().map(|s| s.sup_abs()).fold(0.0, f64::max)
}

fn rescale(tr: Trajectory, values: f64, times: f64, length: f64) -> Trajectory {
    Trajectory {
        times: tr.times.iter().map(|t| t * times).collect(),
        states: tr
            .states
            .into_iter()
            .map(|s| {
                let l = s.box_length() * length;
                GridField::from_raw(s.into_values().into_iter().map(|v| v * values).collect(), l)
            })
            .collect(),
    }
}

/// Newton iteration for `i ψ_t + ψ_xx = |ψ|² ψ` on the torus.
pub fn newton_iterate(
    psi0: &GridField,
    t_end: f64,
    schedule: RadiusSchedule,
    opts: NewtonOptions,
) -> Result<NewtonSolution> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::invalid("T", format!("must be > 0, got {t_end}")));
    }
    if opts.steps < 3 {
        return Err(Error::invalid("steps", "need at least 3 time steps"));
    }
    if opts.max_iter < 1 {
        return Err(Error::invalid("max_iter", "must be >= 1"));
    }
    let lam = opts.scale;
    if !(lam > 0.0 && lam.is_finite()) {
        return Err(Error::invalid("scale", format!("must be > 0, got {lam}")));
    }
    let data = GridField::new(
        psi0.values().iter().map(|v| v * lam).collect(),
        psi0.box_length() / lam,
    )?;
    let horizon = t_end / (lam * lam);

    let psi = free_trajectory(&data, horizon, opts.steps);
    let mut state = NewtonState {
        n: 1,
        eps: sup_majorant(&psi, schedule.radius(1))?,
        residual: first_residual(&psi),
        xi: psi.clone(),
        psi,
    };
    let mut rows = vec![NewtonRow {
        n: 1,
        eps: state.eps,
        sup_residual: sup_traj(&state.residual),
        ratio: None,
    }];
    let mut initial_defect = 0.0f64;
    let mut conjugation_defect = 0.0f64;
    let mut rising = 0;
    while rows.last().unwrap().sup_residual > opts.tol && state.n < opts.max_iter {
        let sys = LinearizedSystem::new(state.psi.clone(), state.residual.clone())?;
        let sol = solve_linearized(&sys)?;
        initial_defect = initial_defect.max(sol.xi.states[0].sup_abs());
        conjugation_defect = conjugation_defect.max(sol.conjugation_defect);
        let xi = sol.xi;
        let next_residual = residual(&state.psi, &xi)?;
        let psi = pointwise(&state.psi, &xi, |p, x| p + x)?;
        let n = state.n + 1;
        let eps = sup_majorant(&xi, schedule.radius(n))?;
        let prev = state.eps;
        state = NewtonState {
            n,
            psi,
            xi,
            eps,
            residual: next_residual,
        };
        rows.push(NewtonRow {
            n,
            eps,
            sup_residual: sup_traj(&state.residual),
            ratio: (prev > 0.0).then(|| eps / (prev * prev)),
        });
        if !eps.is_finite() {
            return Err(Error::NewtonDiverged { n });
        }
        if eps > prev {
            rising += 1;
            if rising >= 2 {
                return Err(Error::NewtonDiverged { n });
            }
        } else {
            rising = 0;
        }
    }
    let converged = rows.last().unwrap().sup_residual <= opts.tol;
    if lam != 1.0 {
        let back = |tr: Trajectory| rescale(tr, 1.0 / lam, lam * lam, lam);
        state.psi = back(state.psi);
        state.xi = back(state.xi);
        // R scales like ψ³/... the equation scales all terms by λ³
        state.residual = rescale(state.residual, lam.powi(-3), lam * lam, lam);
    }
    Ok(NewtonSolution {
        state,
        report: NewtonReport {
            rows,
            scale: lam,
            converged,
            initial_defect,
            conjugation_defect,
        },
    })
}

/// Bisects for the longest horizon in `[lo, hi]` on which the iteration
/// converges within `opts`; `lo` itself must converge.
pub fn bisect_horizon(
    psi0: &GridField,
    lo: f64,
    hi: f64,
    schedule: RadiusSchedule,
    opts: NewtonOptions,
    rounds: usize,
) -> Result<f64> {
    let ok =
        |t: f64| matches!(newton_iterate(psi0, t, schedule, opts), Ok(s) if s.report.converged);
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::invalid("horizon", "need 0 < lo < hi"));
    }
    if !ok(lo) {
        return Err(Error::invalid(
            "horizon",
            format!("no convergence even at T = {lo}"),
        ));
    }
    if ok(hi) {
        return Ok(hi);
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..rounds {
        let mid = 0.5 * (a + b);
        if ok(mid) {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(a)
}

/// `sup |i ψ_t + ψ_xx - |ψ|²ψ + R|` over interior samples, with a
/// fourth-order central difference for `ψ_t`.
pub fn telescoping_defect(psi: &Trajectory, residual: &Trajectory) -> Result<f64> {
    let n = psi.len();
    if n < 5 || residual.times != psi.times {
        return Err(Error::invalid("trajectory", "need >= 5 shared samples"));
    }
    let h = psi.times[1] - psi.times[0];
    let mut grid = SpectralGrid::for_field(&psi.states[0]);
    let mut worst = 0.0f64;
    for j in 2..n - 2 {
        let uxx = grid.second_derivative(&psi.states[j]);
        let s = |q: usize| psi.states[q].values();
        for i in 0..uxx.len() {
            let dt =
                (s(j - 2)[i] - 8.0 * s(j - 1)[i] + 8.0 * s(j + 1)[i] - s(j + 2)[i]) / (12.0 * h);
            let p = s(j)[i];
            let r = residual.states[j].values()[i];
            let d = Complex64::new(0.0, 1.0) * dt + uxx.values()[i] - p * p.norm_sqr() + r;
            worst = worst.max(d.norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuum::{ContinuumModel, LawsonRk4};
    use crate::field::{Coupling, Mollifier};
    use std::f64::consts::PI;

    fn cos_data(a: f64) -> GridField {
        GridField::from_fn(32, 2.0 * PI, |x| Complex64::new(a * x.cos(), 0.0)).unwrap()
    }

    #[test]
    fn zero_data() {
        let z = GridField::zeros(32, 2.0 * PI).unwrap();
        let sol =
            newton_iterate(&z, 0.3, RadiusSchedule::default(), NewtonOptions::default()).unwrap();
        assert!(sol.report.converged);
        assert!(sol.report.rows.iter().all(|r| r.eps == 0.0));
        assert_eq!(sol.state.psi.last().unwrap().sup_abs(), 0.0);
    }

    #[test]
    fn residual_examples() {
        let l = 2.0 * PI;
        let a = Complex64::new(0.3, 0.2);
        let psi1 = free_trajectory(
            &GridField::from_fn(32, l, |x| a * Complex64::from_polar(1.0, 2.0 * x)).unwrap(),
            0.5,
            10,
        );
        let r1 = first_residual(&psi1);
        for (p, r) in psi1.states.iter().zip(&r1.states) {
            for (x, y) in p.values().iter().zip(r.values()) {
                assert!((y - a.norm_sqr() * x).norm() < 1e-15);
            }
        }
        let zero = Trajectory {
            times: psi1.times.clone(),
            states: vec![GridField::zeros(32, l).unwrap(); 11],
        };
        assert!(sup_traj(&residual(&psi1, &zero).unwrap()) == 0.0);
        let lam = 0.5;
        let half = rescale(psi1.clone(), lam, 1.0, 1.0);
        let base = residual(&psi1, &psi1).unwrap();
        let scaled = residual(&psi1, &half).unwrap();
        // ψ fixed, ξ = ψ: terms 2|ξ|²ψ + ξ²ψ̄ scale by λ², |ξ|²ξ by λ³
        let p = psi1.states[3].values()[5];
        let quad = 2.0 * p.norm_sqr() * p + p * p * p.conj();
        let cub = p.norm_sqr() * p;
        assert!((base.states[3].values()[5] - (quad + cub)).norm() < 1e-15);
        assert!(
            (scaled.states[3].values()[5] - (lam * lam * quad + lam.powi(3) * cub)).norm() < 1e-15
        );
    }

    #[test]
    fn cos_data_converges_quadratically() {
        let sol = newton_iterate(
            &cos_data(0.1),
            0.3,
            RadiusSchedule::default(),
            NewtonOptions::default(),
        )
        .unwrap();
        let rep = &sol.report;
        assert!(rep.converged, "{:?}", rep.rows);
        assert!(rep.rows.len() <= 5);
        assert!(rep.rows.last().unwrap().sup_residual <= 1e-10);
        assert!(
            rep.rows.iter().filter_map(|r| r.ratio).all(|q| q <= 1e3),
            "{:?}",
            rep.rows
        );
        assert_eq!(rep.initial_defect, 0.0);
        assert!(rep.conjugation_defect < 1e-15);
    }

    #[test]
    fn telescoping_identity_each_iterate() {
        let psi0 = cos_data(0.1);
        for max_iter in 1..=3 {
            let opts = NewtonOptions {
                max_iter,
                tol: 0.0,
                ..NewtonOptions::default()
            };
            let sol = newton_iterate(&psi0, 0.3, RadiusSchedule::default(), opts).unwrap();
            let d = telescoping_defect(&sol.state.psi, &sol.state.residual).unwrap();
            assert!(d <= 1e-6, "iterate {max_iter}: {d}");
        }
    }

    #[test]
    fn limit_matches_fine_integration() {
        let psi0 = cos_data(0.1);
        let sol = newton_iterate(
            &psi0,
            0.3,
            RadiusSchedule::default(),
            NewtonOptions::default(),
        )
        .unwrap();
        let model = ContinuumModel::new(
            Mollifier::identity(),
            2.0 * PI,
            32,
            0.3 / 3000.0,
            Coupling::Defocusing,
        )
        .unwrap();
        let mut u = psi0.clone();
        LawsonRk4::new(model).advance(&mut u, 3000).unwrap();
        let d = u.sup_distance(sol.state.psi.last().unwrap());
        assert!(d <= 1e-8, "{d}");
    }

    #[test]
    fn rescaling_round_trips() {
        let psi0 = cos_data(0.1);
        let base = newton_iterate(
            &psi0,
            0.3,
            RadiusSchedule::default(),
            NewtonOptions::default(),
        )
        .unwrap();
        let opts = NewtonOptions {
            scale: 2.0,
            ..NewtonOptions::default()
        };
        let sol = newton_iterate(&psi0, 0.3, RadiusSchedule::default(), opts).unwrap();
        assert_eq!(sol.report.scale, 2.0);
        let (a, b) = (
            sol.state.psi.last().unwrap(),
            base.state.psi.last().unwrap(),
        );
        assert_eq!(a.box_length(), b.box_length());
        assert!((sol.state.psi.times.last().unwrap() - 0.3).abs() < 1e-15);
        assert!(a.sup_distance(b) < 1e-10);
    }

    #[test]
    fn horizon_bisection() {
        let opts = NewtonOptions {
            steps: 60,
            max_iter: 4,
            tol: 1e-10,
            scale: 1.0,
        };
        let psi0 = cos_data(1.0);
        let t = bisect_horizon(&psi0, 0.01, 2.0, RadiusSchedule::default(), opts, 6).unwrap();
        assert!(t > 0.01 && t < 2.0, "{t}");
        assert!(
            newton_iterate(&psi0, t, RadiusSchedule::default(), opts)
                .unwrap()
                .report
                .converged
        );
    }

    #[test]
    fn large_data_diverges() {
        let opts = NewtonOptions {
            max_iter: 12,
            ..NewtonOptions::default()
        };
        let r = newton_iterate(&cos_data(6.0), 3.0, RadiusSchedule::default(), opts);
        assert!(
            matches!(
                r,
                Err(Error::NewtonDiverged { .. }) | Err(Error::LinearizedUnstable { .. })
            ),
            "{r:?}"
        );
    }
}
