use num_complex::Complex64;

use crate::continuum::{SpectralGrid, Trajectory};
use crate::error::{Error, Result};
use crate::field::GridField;

/// `i u_t = (M0 + V) u + b` for `u = (ξ, η)` with `M0 = diag(-Δ, Δ)`,
/// `V = [[2|ψ|², ψ²], [-ψ̄², -2|ψ|²]]` and `b = (R, -R̄)`, sampled on a
/// uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedSystem {
    psi: Trajectory,
    forcing: Trajectory,
}

impl LinearizedSystem {
    /// `psi` and `forcing` (the residual `R`) must share times and grid,
    /// with at least four uniformly spaced samples.
    pub fn new(psi: Trajectory, forcing: Trajectory) -> Result<Self> {
        if psi.len() < 4 || psi.times != forcing.times || psi.states.len() != psi.len() {
            return Err(Error::invalid(
                "trajectory",
                "psi and forcing need the same >= 4 sample times",
            ));
        }
        let g = &psi.states[0];
        if psi
            .states
            .iter()
            .chain(&forcing.states)
            .any(|s| !s.same_grid(g))
        {
            return Err(Error::GridMismatch(
                "linearized system samples differ in grid".into(),
            ));
        }
        let h = psi.times[1] - psi.times[0];
        let uniform = psi
            .times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1e-300));
        if !(h > 0.0) || !uniform || psi.times[0] != 0.0 {
            return Err(Error::invalid(
                "times",
                "must start at 0 and be uniformly spaced",
            ));
        }
        Ok(Self { psi, forcing })
    }

    pub fn times(&self) -> &[f64] {
        &self.psi.times
    }

    pub fn psi(&self) -> &Trajectory {
        &self.psi
    }

    pub fn forcing(&self) -> &Trajectory {
        &self.forcing
    }

    /// `V(t_j, x_i)`.
    pub fn potential(&self, j: usize, i: usize) -> [[Complex64; 2]; 2] {
        potential_at(self.psi.states[j].values()[i])
    }

    /// `b(t_j, x_i)`.
    pub fn forcing_at(&self, j: usize, i: usize) -> [Complex64; 2] {
        let r = self.forcing.states[j].values()[i];
        [r, -r.conj()]
    }

    /// `sup_{t,x}` of the operator norm bound `3|ψ|²` of `V`.
    pub fn sup_potential(&self) -> f64 {
        3.0 * self
            .psi
            .states
            .iter()
            .map(|s| s.sup_abs().powi(2))
            .fold(0.0, f64::max)
    }
}

fn potential_at(psi: Complex64) -> [[Complex64; 2]; 2] {
    let a = Complex64::new(2.0 * psi.norm_sqr(), 0.0);
    let p2 = psi * psi;
    [[a, p2], [-p2.conj(), -a]]
}

/// Both components of the solution at every sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedSolution {
    pub xi: Trajectory,
    pub eta: Trajectory,
    /// `max_{t,x} |η - ξ̄|`.
    pub conjugation_defect: f64,
}

/// Samples at `t_j + h/2` by four-point Lagrange interpolation.
fn midpoints(tr: &Trajectory) -> Vec<Vec<Complex64>> {
    let n = tr.len() - 1;
    (0..n)
        .map(|j| {
            let (s, w): (usize, [f64; 4]) = if j == 0 {
                (0, [5.0, 15.0, -5.0, 1.0])
            } else if j + 1 == n {
                (n - 3, [1.0, -5.0, 15.0, 5.0])
            } else {
                (j - 1, [-1.0, 9.0, 9.0, -1.0])
            };
            let m = tr.states[0].len();
            (0..m)
                .map(|i| {
                    (0..4)
                        .map(|q| w[q] / 16.0 * tr.states[s + q].values()[i])
                        .sum::<Complex64>()
                })
                .collect()
        })
        .collect()
}

struct Rhs {
    grid: SpectralGrid,
    bufs: [Vec<Complex64>; 2],
}

impl Rhs {
    /// `out = DFT[-i (V u + b)]` for `u_hat = DFT[u]`.
    fn eval(
        &mut self,
        psi: &[Complex64],
        r: &[Complex64],
        u_hat: [&[Complex64]; 2],
        out: [&mut [Complex64]; 2],
    ) {
        let [b0, b1] = &mut self.bufs;
        b0.copy_from_slice(u_hat[0]);
        b1.copy_from_slice(u_hat[1]);
        self.grid.inverse(b0);
        self.grid.inverse(b1);
        let mi = Complex64::new(0.0, -1.0);
        for i in 0..psi.len() {
            let v = potential_at(psi[i]);
            let (x, y) = (b0[i], b1[i]);
            b0[i] = mi * (v[0][0] * x + v[0][1] * y + r[i]);
            b1[i] = mi * (v[1][0] * x + v[1][1] * y - r[i].conj());
        }
        self.grid.forward(b0);
        self.grid.forward(b1);
        let [o0, o1] = out;
        o0.copy_from_slice(b0);
        o1.copy_from_slice(b1);
    }
}

/// Integrates the system from zero data with Lawson RK4, one step per sample
/// interval; `ψ` and `R` at half steps come from cubic interpolation.
pub fn solve_linearized(sys: &LinearizedSystem) -> Result<LinearizedSolution> {
    let times = sys.times().to_vec();
    let n = times.len() - 1;
    let h = times[1] - times[0];
    let g0 = &sys.psi.states[0];
    let (m, box_length) = (g0.len(), g0.box_length());
    let grid = SpectralGrid::for_field(g0);
    let half: [Vec<Complex64>; 2] = [
        grid.wavenumbers()
            .iter()
            .map(|k| Complex64::from_polar(1.0, -0.5 * k * k * h))
            .collect(),
        grid.wavenumbers()
            .iter()
            .map(|k| Complex64::from_polar(1.0, 0.5 * k * k * h))
            .collect(),
    ];
    let full: [Vec<Complex64>; 2] = [
        half[0].iter().map(|e| e * e).collect(),
        half[1].iter().map(|e| e * e).collect(),
    ];
    let psi_mid = midpoints(&sys.psi);
    let r_mid = midpoints(&sys.forcing);
    let sup_v = sys.sup_potential();
    let b_norm = |j: usize| l2(sys.forcing.states[j].values(), box_length) * 2f64.sqrt();

    let zero = vec![Complex64::new(0.0, 0.0); m];
    let mut rhs = Rhs {
        grid,
        bufs: [zero.clone(), zero.clone()],
    };
    let mut u = [zero.clone(), zero.clone()];
    let mut k: Vec<[Vec<Complex64>; 2]> = (0..4).map(|_| [zero.clone(), zero.clone()]).collect();
    let mut tmp = [zero.clone(), zero.clone()];
    let mut xi = vec![GridField::from_raw(zero.clone(), box_length)];
    let mut eta = vec![GridField::from_raw(zero.clone(), box_length)];
    let mut forcing_integral = 0.0;
    // Quadrature error on steeply rising forcing is judged against the
    // whole forcing budget, not the budget accumulated so far.
    let slack = 1e-8
        * (0..n)
            .map(|j| 0.5 * h * (b_norm(j) + b_norm(j + 1)))
            .sum::<f64>();
    let mut defect = 0.0f64;

    for j in 0..n {
        let psi0 = sys.psi.states[j].values();
        let r0 = sys.forcing.states[j].values();
        let psi1 = sys.psi.states[j + 1].values();
        let r1 = sys.forcing.states[j + 1].values();
        {
            let [a, b] = &mut k[0];
            rhs.eval(psi0, r0, [&u[0], &u[1]], [a, b]);
        }
        for c in 0..2 {
            for i in 0..m {
                tmp[c][i] = half[c][i] * (u[c][i] + 0.5 * h * k[0][c][i]);
            }
        }
        {
            let [a, b] = &mut k[1];
            rhs.eval(&psi_mid[j], &r_mid[j], [&tmp[0], &tmp[1]], [a, b]);
        }
        for c in 0..2 {
            for i in 0..m {
                tmp[c][i] = half[c][i] * u[c][i] + 0.5 * h * k[1][c][i];
            }
        }
        {
            let [a, b] = &mut k[2];
            rhs.eval(&psi_mid[j], &r_mid[j], [&tmp[0], &tmp[1]], [a, b]);
        }
        for c in 0..2 {
            for i in 0..m {
                tmp[c][i] = full[c][i] * u[c][i] + h * half[c][i] * k[2][c][i];
            }
        }
        {
            let [a, b] = &mut k[3];
            rhs.eval(psi1, r1, [&tmp[0], &tmp[1]], [a, b]);
        }
        for c in 0..2 {
            for i in 0..m {
                let (e, e2) = (half[c][i], full[c][i]);
                u[c][i] = e2 * u[c][i]
                    + (h / 6.0)
                        * (e2 * k[0][c][i] + 2.0 * e * (k[1][c][i] + k[2][c][i]) + k[3][c][i]);
            }
        }
        let mut a = u[0].clone();
        let mut b = u[1].clone();
        rhs.grid.inverse(&mut a);
        rhs.grid.inverse(&mut b);

        let t = times[j + 1];
        forcing_integral += 0.5 * h * (b_norm(j) + b_norm(j + 1));
        let norm = (l2(&a, box_length).powi(2) + l2(&b, box_length).powi(2)).sqrt();
        let bound = (forcing_integral + slack) * (10.0 * t * sup_v).exp() + 1e-300;
        if !norm.is_finite() || norm > bound {
            return Err(Error::LinearizedUnstable { t, norm, bound });
        }
        for (x, y) in a.iter().zip(&b) {
            defect = defect.max((y - x.conj()).norm());
        }
        xi.push(GridField::from_raw(a, box_length));
        eta.push(GridField::from_raw(b, box_length));
    }
    Ok(LinearizedSolution {
        xi: Trajectory {
            times: times.clone(),
            states: xi,
        },
        eta: Trajectory { times, states: eta },
        conjugation_defect: defect,
    })
}

fn l2(v: &[Complex64], box_length: f64) -> f64 {
    (box_length / v.len() as f64 * v.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
}
