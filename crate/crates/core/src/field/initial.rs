use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{GridField, LatticeField};
use crate::error::{Error, Result};

/// Gaussians `e^{-(x-j)²}` below this value are dropped from comb sums.
pub const COMB_TRUNCATION: f64 = 1e-18;

/// Largest `|x - j|` kept in a comb sum.
fn comb_reach() -> f64 {
    (-COMB_TRUNCATION.ln()).sqrt()
}

/// Finite coefficient sequence `a_j` for `j = first, first+1, …`.
#[derive(Debug, Clone, PartialEq)]
pub struct CombSeq {
    pub first: i64,
    pub values: Vec<Complex64>,
}

impl CombSeq {
    pub fn new(first: i64, values: Vec<Complex64>) -> Self {
        Self { first, values }
    }

    pub fn get(&self, j: i64) -> Complex64 {
        let i = j - self.first;
        if i < 0 || i as usize >= self.values.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[i as usize]
        }
    }

    pub fn last(&self) -> i64 {
        self.first + self.values.len() as i64 - 1
    }
}

/// Pointwise value of `Σ_j a_j e^{-(x-j)²}`.
pub fn gaussian_comb_eval(a: &CombSeq, x: f64) -> Complex64 {
    let reach = comb_reach();
    let lo = ((x - reach).ceil() as i64).max(a.first);
    let hi = ((x + reach).floor() as i64).min(a.last());
    let mut acc = Complex64::new(0.0, 0.0);
    for j in lo..=hi {
        let d = x - j as f64;
        acc += a.get(j) * (-d * d).exp();
    }
    acc
}

/// How the comb coefficients `a_j` are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum CombCoefficients {
    /// `a_j = value` for all `j`.
    Uniform { value: Complex64 },
    /// `a_j = e^{iθ_j}`, θ uniform on `[0, 2π)`.
    RandomPhase { seed: u64 },
    /// `a_j` uniform on `[-1, 1]`, real.
    RandomReal { seed: u64 },
    /// Finitely supported explicit list.
    Explicit(CombSeq),
}

impl CombCoefficients {
    /// Coefficients for `j ∈ [first, last]`. Random kinds draw sequentially
    /// from `first`, so equal ranges give equal sequences.
    pub fn realize(&self, first: i64, last: i64) -> CombSeq {
        let n = (last - first + 1).max(0) as usize;
        let values = match self {
            CombCoefficients::Uniform { value } => vec![*value; n],
            CombCoefficients::RandomPhase { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..n)
                    .map(|_| Complex64::from_polar(1.0, 2.0 * PI * rng.gen::<f64>()))
                    .collect()
            }
            CombCoefficients::RandomReal { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..n)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), 0.0))
                    .collect()
            }
            CombCoefficients::Explicit(seq) => (first..=last).map(|j| seq.get(j)).collect(),
        };
        CombSeq::new(first, values)
    }

    fn sup(&self) -> f64 {
        match self {
            CombCoefficients::Uniform { value } => value.norm(),
            CombCoefficients::RandomPhase { .. } | CombCoefficients::RandomReal { .. } => 1.0,
            CombCoefficients::Explicit(seq) => {
                seq.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
            }
        }
    }
}

/// Initial-data generators.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Constant {
        amplitude: f64,
    },
    /// `A e^{iθ_x}` with θ uniform on `[0, 2π)` (ChaCha8 stream seeded by `seed`).
    RandomPhase {
        amplitude: f64,
        seed: u64,
    },
    /// `A (g_1 + i g_2)/√2` with standard normal `g`; `E|ψ|² = A²`, unbounded.
    RandomGaussian {
        amplitude: f64,
        seed: u64,
    },
    /// `A Σ_j a_j e^{-(x-j)²}`.
    GaussianComb {
        amplitude: f64,
        coefficients: CombCoefficients,
    },
    /// `Σ_k a_k cos(ω_k x)`.
    Periodic {
        amplitudes: Vec<f64>,
        frequencies: Vec<f64>,
    },
    /// `A` at the origin, zero elsewhere.
    Delta {
        amplitude: f64,
    },
}

impl InitialData {
    pub fn validate(&self) -> Result<()> {
        let check_amp = |a: f64| {
            if a.is_finite() && a >= 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(
                    "amplitude",
                    format!("must be finite and >= 0, got {a}"),
                ))
            }
        };
        match self {
            InitialData::Constant { amplitude }
            | InitialData::RandomPhase { amplitude, .. }
            | InitialData::RandomGaussian { amplitude, .. }
            | InitialData::Delta { amplitude } => check_amp(*amplitude),
            InitialData::GaussianComb {
                amplitude,
                coefficients,
            } => {
                check_amp(*amplitude)?;
                if let CombCoefficients::Explicit(seq) = coefficients {
                    if seq.values.iter().any(|v| !(v.norm() <= 1.0)) {
                        return Err(Error::invalid("coefficients", "need |a_j| <= 1"));
                    }
                }
                if let CombCoefficients::Uniform { value } = coefficients {
                    if !(value.norm() <= 1.0) {
                        return Err(Error::invalid("coefficients", "need |a_j| <= 1"));
                    }
                }
                Ok(())
            }
            InitialData::Periodic {
                amplitudes,
                frequencies,
            } => {
                if amplitudes.len() != frequencies.len() || amplitudes.is_empty() {
                    return Err(Error::invalid(
                        "periodic",
                        "amplitudes and frequencies must be non-empty and of equal length",
                    ));
                }
                if amplitudes.iter().chain(frequencies).any(|v| !v.is_finite()) {
                    return Err(Error::invalid("periodic", "non-finite parameter"));
                }
                Ok(())
            }
        }
    }

    /// Sup-norm bound `A` for bounded kinds (`None` for the Gaussian kind).
    pub fn bound(&self) -> Option<f64> {
        match self {
            InitialData::Constant { amplitude }
            | InitialData::RandomPhase { amplitude, .. }
            | InitialData::Delta { amplitude } => Some(*amplitude),
            InitialData::RandomGaussian { .. } => None,
            // max_x Σ_j e^{-(x-j)²}, attained at integer x
            InitialData::GaussianComb {
                amplitude,
                coefficients,
            } => Some(amplitude * coefficients.sup() * 1.772_637_204_826_652_2),
            InitialData::Periodic { amplitudes, .. } => {
                Some(amplitudes.iter().map(|a| a.abs()).sum())
            }
        }
    }
}

/// Samples `spec` on the lattice `{-N, …, N}`.
pub fn make_initial_lattice(spec: &InitialData, extent: usize) -> Result<LatticeField> {
    if extent < 1 {
        return Err(Error::invalid("extent", "must be >= 1"));
    }
    spec.validate()?;
    let n = extent as i64;
    let field = match spec {
        InitialData::Constant { amplitude } => {
            LatticeField::from_fn(extent, |_| Complex64::new(*amplitude, 0.0))
        }
        InitialData::RandomPhase { amplitude, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            LatticeField::from_fn(extent, |_| {
                Complex64::from_polar(*amplitude, 2.0 * PI * rng.gen::<f64>())
            })
        }
        InitialData::RandomGaussian { amplitude, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let s = amplitude / 2f64.sqrt();
            LatticeField::from_fn(extent, |_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(s * re, s * im)
            })
        }
        InitialData::GaussianComb {
            amplitude,
            coefficients,
        } => {
            let pad = comb_reach().ceil() as i64 + 1;
            let a = coefficients.realize(-n - pad, n + pad);
            LatticeField::from_fn(extent, |x| *amplitude * gaussian_comb_eval(&a, x as f64))
        }
        InitialData::Periodic {
            amplitudes,
            frequencies,
        } => LatticeField::from_fn(extent, |x| {
            let v: f64 = amplitudes
                .iter()
                .zip(frequencies)
                .map(|(a, w)| a * (w * x as f64).cos())
                .sum();
            Complex64::new(v, 0.0)
        }),
        InitialData::Delta { amplitude } => LatticeField::from_fn(extent, |x| {
            Complex64::new(if x == 0 { *amplitude } else { 0.0 }, 0.0)
        }),
    };
    Ok(field)
}

/// Samples `spec` on an `m`-point periodic grid of length `box_length`.
///
/// Comb data is periodized: each Gaussian is summed over its images. Combs
/// with infinitely many coefficients need an integer box length so that
/// `a_j` can repeat with period `L`. Point-like kinds (random phase per
/// sample, delta) are rejected because they are not resolved by the grid.
pub fn make_initial_grid(spec: &InitialData, m: usize, box_length: f64) -> Result<GridField> {
    spec.validate()?;
    match spec {
        InitialData::Constant { amplitude } => {
            GridField::from_fn(m, box_length, |_| Complex64::new(*amplitude, 0.0))
        }
        InitialData::Periodic {
            amplitudes,
            frequencies,
        } => GridField::from_fn(m, box_length, |x| {
            let v: f64 = amplitudes
                .iter()
                .zip(frequencies)
                .map(|(a, w)| a * (w * x).cos())
                .sum();
            Complex64::new(v, 0.0)
        }),
        InitialData::GaussianComb {
            amplitude,
            coefficients,
        } => {
            let a = periodic_coefficients(coefficients, box_length)?;
            let reach = comb_reach();
            GridField::from_fn(m, box_length, |x| {
                let mut acc = Complex64::new(0.0, 0.0);
                // images x - nL fall into the window of each coefficient
                let nmax = ((reach + box_length) / box_length).ceil() as i64 + 1;
                for img in -nmax..=nmax {
                    let xs = x - img as f64 * box_length;
                    if xs < a.first as f64 - reach || xs > a.last() as f64 + reach {
                        continue;
                    }
                    acc += gaussian_comb_eval(&a, xs);
                }
                *amplitude * acc
            })
        }
        InitialData::RandomPhase { .. } | InitialData::RandomGaussian { .. } => {
            Err(Error::invalid(
                "data",
                "point-wise random data is not resolved on a spectral grid; use a gaussian comb",
            ))
        }
        InitialData::Delta { .. } => Err(Error::invalid("data", "delta data is lattice-only")),
    }
}

fn periodic_coefficients(c: &CombCoefficients, box_length: f64) -> Result<CombSeq> {
    if let CombCoefficients::Explicit(seq) = c {
        return Ok(seq.clone());
    }
    let rounded = box_length.round();
    if (box_length - rounded).abs() > 1e-9 || rounded < 1.0 {
        return Err(Error::invalid(
            "box_length",
            format!(
                "comb data with unbounded support needs an integer box length, got {box_length}"
            ),
        ));
    }
    let l = rounded as i64;
    let first = -(l / 2);
    Ok(c.realize(first, first + l - 1))
}

/// Rational approximation of `cos x + cos(√2 x)` on a torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiPeriodicTorus {
    pub p: u64,
    pub q: u64,
    /// `2π q`, the smallest period of `cos x + cos((p/q) x)`.
    pub box_length: f64,
    /// `|p/q - √2|`.
    pub frequency_error: f64,
}

impl QuasiPeriodicTorus {
    pub fn data(&self) -> InitialData {
        InitialData::Periodic {
            amplitudes: vec![1.0, 1.0],
            frequencies: vec![1.0, self.p as f64 / self.q as f64],
        }
    }
}

/// Last continued-fraction convergent `p/q` of √2 with `q <= q_max`.
pub fn quasi_periodic_torus(q_max: u64) -> QuasiPeriodicTorus {
    // convergents of √2: p_{k+1} = p_k + 2 q_k, q_{k+1} = p_k + q_k
    let (mut p, mut q) = (1u64, 1u64);
    loop {
        let (np, nq) = (p + 2 * q, p + q);
        if nq > q_max {
            break;
        }
        p = np;
        q = nq;
    }
    QuasiPeriodicTorus {
        p,
        q,
        box_length: 2.0 * PI * q as f64,
        frequency_error: (p as f64 / q as f64 - 2f64.sqrt()).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn constant_and_delta() {
        let f = make_initial_lattice(&InitialData::Constant { amplitude: 1.0 }, 2).unwrap();
        assert_eq!(f.values(), &[c(1.0); 5]);
        let d = make_initial_lattice(&InitialData::Delta { amplitude: 1.0 }, 2).unwrap();
        assert_eq!(d.values(), &[c(0.0), c(0.0), c(1.0), c(0.0), c(0.0)]);
    }

    #[test]
    fn random_phase_unit_modulus_and_reproducible() {
        let spec = InitialData::RandomPhase {
            amplitude: 1.0,
            seed: 7,
        };
        let a = make_initial_lattice(&spec, 10_000).unwrap();
        let b = make_initial_lattice(&spec, 10_000).unwrap();
        assert!(a.values().iter().all(|v| (v.norm() - 1.0).abs() < 1e-15));
        // bitwise identical
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
        let other = make_initial_lattice(
            &InitialData::RandomPhase {
                amplitude: 1.0,
                seed: 8,
            },
            10_000,
        )
        .unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn bounded_kinds_respect_bound() {
        let kinds = vec![
            InitialData::Constant { amplitude: 0.7 },
            InitialData::RandomPhase {
                amplitude: 1.3,
                seed: 1,
            },
            InitialData::Periodic {
                amplitudes: vec![0.5, 0.25],
                frequencies: vec![0.3, 0.3 * 2f64.sqrt()],
            },
            InitialData::GaussianComb {
                amplitude: 1.0,
                coefficients: CombCoefficients::RandomPhase { seed: 3 },
            },
            InitialData::Delta { amplitude: 2.0 },
        ];
        for k in kinds {
            let f = make_initial_lattice(&k, 500).unwrap();
            assert!(f.sup_abs() <= k.bound().unwrap() + 1e-12, "{k:?}");
        }
        assert!(InitialData::RandomGaussian {
            amplitude: 1.0,
            seed: 0
        }
        .bound()
        .is_none());
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(make_initial_lattice(&InitialData::Constant { amplitude: 1.0 }, 0).is_err());
        assert!(make_initial_lattice(&InitialData::Constant { amplitude: -1.0 }, 3).is_err());
        assert!(make_initial_lattice(
            &InitialData::Periodic {
                amplitudes: vec![1.0],
                frequencies: vec![]
            },
            3
        )
        .is_err());
        let bad = InitialData::GaussianComb {
            amplitude: 1.0,
            coefficients: CombCoefficients::Uniform { value: c(1.5) },
        };
        assert!(make_initial_lattice(&bad, 3).is_err());
    }

    #[test]
    fn comb_examples() {
        let zero = CombSeq::new(-50, vec![c(0.0); 101]);
        assert_eq!(gaussian_comb_eval(&zero, 0.3), c(0.0));
        let delta = CombSeq::new(0, vec![c(1.0)]);
        assert_eq!(gaussian_comb_eval(&delta, 0.0), c(1.0));
    }

    #[test]
    fn uniform_comb_matches_wide_sum() {
        // naive wide sum over |j| <= 60 without truncation
        let naive: f64 = (-60..=60).map(|j: i64| (-(j * j) as f64).exp()).sum();
        assert!((naive - 1.772_637_204_826_652_2).abs() < 1e-15);
        let ones = CombSeq::new(-100, vec![c(1.0); 201]);
        let v = gaussian_comb_eval(&ones, 0.0);
        assert!((v.re - naive).abs() < 1e-15 && v.im == 0.0);
        // off-lattice point, against the same naive sum
        let x = 0.37;
        let naive_x: f64 = (-60..=60)
            .map(|j: i64| (-(x - j as f64).powi(2)).exp())
            .sum();
        assert!((gaussian_comb_eval(&ones, x).re - naive_x).abs() < 1e-15);
    }

    #[test]
    fn periodized_comb_on_integer_box() {
        let spec = InitialData::GaussianComb {
            amplitude: 1.0,
            coefficients: CombCoefficients::Uniform { value: c(1.0) },
        };
        let g = make_initial_grid(&spec, 64, 16.0).unwrap();
        let expect = gaussian_comb_eval(&CombSeq::new(-100, vec![c(1.0); 201]), g.x(5));
        assert!((g.values()[5] - expect).norm() < 1e-14);
        assert!(make_initial_grid(&spec, 64, 16.5).is_err());
        assert!(make_initial_grid(&InitialData::Delta { amplitude: 1.0 }, 64, 16.0).is_err());
    }

    #[test]
    fn sqrt2_convergent() {
        let t = quasi_periodic_torus(200);
        assert_eq!((t.p, t.q), (239, 169));
        assert!(t.frequency_error < 2e-5);
        assert!((t.box_length - 2.0 * PI * 169.0).abs() < 1e-12);
    }
}
