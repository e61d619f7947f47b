//! Containers and helpers shared by every engine.

mod cutoff;
mod fourier;
mod initial;

pub use cutoff::{chi, chi_prime};
pub use fourier::{signed_mode, Fourier};
pub use initial::{
    gaussian_comb_eval, make_initial_grid, make_initial_lattice, quasi_periodic_torus,
    CombCoefficients, CombSeq, InitialData, QuasiPeriodicTorus, COMB_TRUNCATION,
};

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Sign of the power nonlinearity. `Linear` switches it off entirely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coupling {
    Defocusing,
    Focusing,
    Linear,
}

impl Coupling {
    pub fn sign(self) -> f64 {
        match self {
            Coupling::Defocusing => 1.0,
            Coupling::Focusing => -1.0,
            Coupling::Linear => 0.0,
        }
    }
}

/// Complex amplitudes on the truncated lattice `{-N, ..., N}`.
///
/// Site `x` lives at `values[x + N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeField {
    values: Vec<Complex64>,
    extent: usize,
}

impl LatticeField {
    pub fn zeros(extent: usize) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); 2 * extent + 1],
            extent,
        }
    }

    pub fn from_values(extent: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != 2 * extent + 1 {
            return Err(Error::invalid(
                "values",
                format!("expected {} sites, got {}", 2 * extent + 1, values.len()),
            ));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::invalid("values", "non-finite amplitude"));
        }
        Ok(Self { values, extent })
    }

    pub fn from_fn(extent: usize, mut f: impl FnMut(i64) -> Complex64) -> Self {
        let n = extent as i64;
        Self {
            values: (-n..=n).map(&mut f).collect(),
            extent,
        }
    }

    pub fn extent(&self) -> usize {
        self.extent
    }

    pub fn origin_index(&self) -> usize {
        self.extent
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Amplitude at site `x`, or `None` outside the truncated lattice.
    pub fn get(&self, x: i64) -> Option<Complex64> {
        let i = x + self.extent as i64;
        (i >= 0 && (i as usize) < self.values.len()).then(|| self.values[i as usize])
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Iterator over `(site, amplitude)` pairs from `-N` to `N`.
    pub fn sites(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.extent as i64;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (i as i64 - n, *v))
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Global ℓ² mass `Σ |ψ(x)|²`.
    pub fn mass(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// `M` complex samples of a periodic function on `[-L/2, L/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    values: Vec<Complex64>,
    box_length: f64,
}

impl GridField {
    pub fn new(values: Vec<Complex64>, box_length: f64) -> Result<Self> {
        let m = values.len();
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::invalid(
                "grid_size",
                format!("{m} is not a power of two >= 2"),
            ));
        }
        if !(box_length > 0.0 && box_length.is_finite()) {
            return Err(Error::invalid("box_length", "must be positive and finite"));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::invalid("values", "non-finite sample"));
        }
        Ok(Self { values, box_length })
    }

    pub fn zeros(m: usize, box_length: f64) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); m], box_length)
    }

    pub fn from_fn(m: usize, box_length: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let h = box_length / m as f64;
        let values = (0..m)
            .map(|j| f(-0.5 * box_length + j as f64 * h))
            .collect();
        Self::new(values, box_length)
    }

    /// Wraps already validated samples; used on hot paths.
    pub(crate) fn from_raw(values: Vec<Complex64>, box_length: f64) -> Self {
        debug_assert!(values.len().is_power_of_two());
        Self { values, box_length }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.values.len() as f64
    }

    /// Position of sample `j`.
    pub fn x(&self, j: usize) -> f64 {
        -0.5 * self.box_length + j as f64 * self.spacing()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn same_grid(&self, other: &GridField) -> bool {
        self.values.len() == other.values.len() && self.box_length == other.box_length
    }

    /// Index of the sample nearest to `x` (periodic).
    pub fn nearest_index(&self, x: f64) -> usize {
        let m = self.values.len() as f64;
        let s = ((x + 0.5 * self.box_length) / self.spacing()).round();
        (s.rem_euclid(m)) as usize
    }

    /// `max_j |self_j - other_j|`.
    pub fn sup_distance(&self, other: &GridField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Fourier coefficients `c_m` with `f(x) = Σ_m c_m e^{i k_m x}`, `k_m = 2πm/L`.
///
/// Coefficients are stored in FFT order (`m = 0, 1, …, M/2-1, -M/2, …, -1`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    coeffs: Vec<Complex64>,
    box_length: f64,
}

impl SpectralField {
    pub fn from_grid(f: &GridField) -> Self {
        let m = f.len();
        let mut buf = f.values().to_vec();
        Fourier::new(m).forward(&mut buf);
        let scale = 1.0 / m as f64;
        for (i, c) in buf.iter_mut().enumerate() {
            // x_0 = -L/2 contributes the factor e^{iπm} = (-1)^m.
            let sign = if signed_mode(i, m) % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            *c *= scale * sign;
        }
        Self {
            coeffs: buf,
            box_length: f.box_length(),
        }
    }

    pub fn to_grid(&self) -> GridField {
        let m = self.coeffs.len();
        let mut buf: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let sign = if signed_mode(i, m) % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                c * sign * m as f64
            })
            .collect();
        Fourier::new(m).inverse(&mut buf);
        GridField::from_raw(buf, self.box_length)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn mode(&self, i: usize) -> i64 {
        signed_mode(i, self.coeffs.len())
    }

    pub fn wavenumber(&self, i: usize) -> f64 {
        2.0 * PI * self.mode(i) as f64 / self.box_length
    }
}

/// Wavenumbers `2πm/L` of an `m`-point grid in FFT order.
pub fn wavenumbers(m: usize, box_length: f64) -> Vec<f64> {
    (0..m)
        .map(|i| 2.0 * PI * signed_mode(i, m) as f64 / box_length)
        .collect()
}

/// Space-time weight `F(t,x) = ((x-x0)² + 1)^{1/2} / (R (2 t0 - t + 1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightProfile {
    x0: i64,
    r: f64,
    t0: f64,
}

impl WeightProfile {
    pub fn new(x0: i64, r: f64, t0: f64) -> Result<Self> {
        if !(r >= 1.0 && r.is_finite()) {
            return Err(Error::invalid("R", format!("must be >= 1, got {r}")));
        }
        if !(t0 >= 0.0 && t0.is_finite()) {
            return Err(Error::invalid("t0", format!("must be >= 0, got {t0}")));
        }
        Ok(Self { x0, r, t0 })
    }

    pub fn x0(&self) -> i64 {
        self.x0
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn check_time(&self, t: f64) -> Result<()> {
        if t < 0.0 || t > self.t0 || t.is_nan() {
            return Err(Error::TimeOutOfRange { t, t0: self.t0 });
        }
        Ok(())
    }

    pub fn eval(&self, t: f64, x: i64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.eval_unchecked(t, x))
    }

    pub(crate) fn eval_unchecked(&self, t: f64, x: i64) -> f64 {
        let d = (x - self.x0) as f64;
        (d * d + 1.0).sqrt() / (self.r * (2.0 * self.t0 - t + 1.0))
    }
}

/// Smoothing kernel applied by convolution in the regularized nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mollifier {
    /// Unit-mass Gaussian of width `sigma`: transfer `e^{-σ²k²/2}`.
    Gaussian { sigma: f64 },
    /// Sharp Fourier truncation: transfer `1_{|k| <= K}`.
    FourierCutoff { k: f64 },
}

impl Mollifier {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid("sigma", format!("must be > 0, got {sigma}")));
        }
        Ok(Mollifier::Gaussian { sigma })
    }

    pub fn fourier_cutoff(k: f64) -> Result<Self> {
        if !(k > 0.0) || k.is_nan() {
            return Err(Error::invalid("K", format!("must be > 0, got {k}")));
        }
        Ok(Mollifier::FourierCutoff { k })
    }

    /// The σ → 0 limit: identity on every representable mode.
    pub fn identity() -> Self {
        Mollifier::FourierCutoff { k: f64::INFINITY }
    }

    pub fn transfer(&self, k: f64) -> f64 {
        match *self {
            Mollifier::Gaussian { sigma } => (-0.5 * sigma * sigma * k * k).exp(),
            Mollifier::FourierCutoff { k: cut } => {
                if k.abs() <= cut {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Real-space Gaussian density; `None` for the sharp cutoff.
    pub fn kernel(&self, x: f64) -> Option<f64> {
        match *self {
            Mollifier::Gaussian { sigma } => {
                Some((-0.5 * x * x / (sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt()))
            }
            Mollifier::FourierCutoff { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lattice_layout() {
        let f = LatticeField::from_fn(3, |x| c(x as f64, 0.0));
        assert_eq!(f.len(), 7);
        assert_eq!(f.origin_index(), 3);
        assert_eq!(f.get(0), Some(c(0.0, 0.0)));
        assert_eq!(f.get(-3), Some(c(-3.0, 0.0)));
        assert_eq!(f.get(4), None);
        assert!(LatticeField::from_values(2, vec![c(0.0, 0.0); 4]).is_err());
        assert!(LatticeField::from_values(1, vec![c(f64::NAN, 0.0); 3]).is_err());
    }

    #[test]
    fn grid_requires_power_of_two() {
        assert!(GridField::zeros(12, 1.0).is_err());
        assert!(GridField::zeros(16, 0.0).is_err());
        let g = GridField::zeros(16, 8.0).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.x(0), -4.0);
        assert_eq!(g.nearest_index(0.0), 8);
    }

    #[test]
    fn weight_examples() {
        let w = WeightProfile::new(0, 1.0, 0.0).unwrap();
        assert_eq!(w.eval(0.0, 0).unwrap(), 1.0);
        let w = WeightProfile::new(0, 1.0, 10.0).unwrap();
        assert!((w.eval(0.0, 0).unwrap() - 1.0 / 21.0).abs() < 1e-16);
        let w = WeightProfile::new(5, 2.0, 10.0).unwrap();
        assert!((w.eval(10.0, 5).unwrap() - 1.0 / 22.0).abs() < 1e-16);
        assert!(w.eval(10.5, 5).is_err());
        assert!(w.eval(-0.1, 5).is_err());
        assert!(WeightProfile::new(0, 0.5, 1.0).is_err());
        assert!(WeightProfile::new(0, 1.0, -1.0).is_err());
    }

    #[test]
    fn weight_factor_nonincreasing_in_time() {
        // F grows as 2 t0 - t + 1 shrinks, so e^{-F} can only decrease.
        let w = WeightProfile::new(3, 2.5, 40.0).unwrap();
        for x in -50..50 {
            let mut prev = w.eval(0.0, x).unwrap();
            for i in 1..=400 {
                let v = w.eval(0.1 * i as f64, x).unwrap();
                assert!(v > 0.0 && v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn mollifier_transfer() {
        let g = Mollifier::gaussian(1.0).unwrap();
        assert_eq!(g.transfer(0.0), 1.0);
        assert!((g.transfer(2.0) - (-2.0f64).exp()).abs() < 1e-16);
        assert_eq!(g.transfer(1.3), g.transfer(-1.3));
        let k = Mollifier::fourier_cutoff(3.0).unwrap();
        assert_eq!(k.transfer(3.0), 1.0);
        assert_eq!(k.transfer(-3.1), 0.0);
        assert!(Mollifier::gaussian(0.0).is_err());
        assert!(Mollifier::fourier_cutoff(-1.0).is_err());
        assert_eq!(Mollifier::identity().transfer(1e6), 1.0);
    }

    #[test]
    fn gaussian_kernel_unit_mass() {
        let g = Mollifier::gaussian(0.7).unwrap();
        let h = 1e-3;
        let mass: f64 = (-20_000..=20_000)
            .map(|i| g.kernel(i as f64 * h).unwrap() * h)
            .sum();
        assert!((mass - 1.0).abs() < 1e-12);
        assert_eq!(g.kernel(0.4), g.kernel(-0.4));
    }

    #[test]
    fn spectral_round_trip_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..100 {
            let m = 1 << (3 + trial % 8);
            let vals: Vec<Complex64> = (0..m)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let f = GridField::new(vals, 3.0 + trial as f64).unwrap();
            let back = SpectralField::from_grid(&f).to_grid();
            let scale = f.sup_abs();
            assert!(back.sup_distance(&f) <= 1e-12 * scale);
        }
    }

    #[test]
    fn spectral_coefficients_of_plane_wave() {
        let l = 2.0 * PI;
        let f = GridField::from_fn(16, l, |x| Complex64::from_polar(1.0, 3.0 * x)).unwrap();
        let s = SpectralField::from_grid(&f);
        for (i, cf) in s.coeffs().iter().enumerate() {
            let expect = if s.mode(i) == 3 { 1.0 } else { 0.0 };
            assert!((cf - c(expect, 0.0)).norm() < 1e-14, "mode {}", s.mode(i));
        }
        assert!((s.wavenumber(3) - 3.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn chi_symmetric_bounded(x in -10.0f64..10.0) {
            let v = chi(x);
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert_eq!(v, chi(-x));
        }
    }
}
