use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{wavenumbers, Fourier, GridField};

/// FFT plan and wavenumbers for one periodic grid.
///
/// Diagonal Fourier multipliers act on the raw DFT of the samples. The
/// `(-1)^m` shift between the DFT and [`crate::field::SpectralField`]
/// coefficients commutes with every such multiplier.
#[derive(Debug, Clone)]
pub struct SpectralGrid {
    box_length: f64,
    k: Vec<f64>,
    keep: Vec<bool>,
    fourier: Fourier,
}

impl SpectralGrid {
    pub fn new(m: usize, box_length: f64) -> Result<Self> {
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::invalid(
                "grid_size",
                format!("{m} is not a power of two >= 2"),
            ));
        }
        if !(box_length > 0.0 && box_length.is_finite()) {
            return Err(Error::invalid("box_length", "must be positive and finite"));
        }
        let k = wavenumbers(m, box_length);
        let limit = dealias_limit(m) as i64;
        let keep = (0..m)
            .map(|i| crate::field::signed_mode(i, m).abs() <= limit)
            .collect();
        Ok(Self {
            box_length,
            k,
            keep,
            fourier: Fourier::new(m),
        })
    }

    pub fn for_field(u: &GridField) -> Self {
        Self::new(u.len(), u.box_length()).expect("GridField invariants")
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.len() as f64
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    /// Modes kept by the 2/3 rule.
    pub fn dealias_mask(&self) -> &[bool] {
        &self.keep
    }

    pub fn matches(&self, u: &GridField) -> bool {
        u.len() == self.len() && u.box_length() == self.box_length
    }

    pub(crate) fn check(&self, u: &GridField) -> Result<()> {
        if self.matches(u) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "field has {} points on L = {}, grid has {} on L = {}",
                u.len(),
                u.box_length(),
                self.len(),
                self.box_length
            )))
        }
    }

    pub fn forward(&mut self, buf: &mut [Complex64]) {
        self.fourier.forward(buf);
    }

    pub fn inverse(&mut self, buf: &mut [Complex64]) {
        self.fourier.inverse(buf);
    }

    /// `u ↦ F^{-1}[ m(k) F u ]`.
    pub fn apply(&mut self, u: &GridField, m: impl Fn(f64) -> Complex64) -> GridField {
        let mut buf = u.values().to_vec();
        self.forward(&mut buf);
        for (c, &k) in buf.iter_mut().zip(&self.k) {
            *c *= m(k);
        }
        self.inverse(&mut buf);
        GridField::from_raw(buf, self.box_length)
    }

    pub fn derivative(&mut self, u: &GridField) -> GridField {
        self.apply(u, |k| Complex64::new(0.0, k))
    }

    pub fn second_derivative(&mut self, u: &GridField) -> GridField {
        self.apply(u, |k| Complex64::new(-k * k, 0.0))
    }
}

/// Largest `|m|` kept by the 2/3 rule on an `m`-point grid.
pub fn dealias_limit(m: usize) -> usize {
    m / 3
}

/// Trapezoidal `∫ f dx` over the periodic box.
pub fn box_integral(u: &GridField, f: impl Fn(Complex64) -> f64) -> f64 {
    u.spacing() * u.values().iter().map(|&v| f(v)).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn derivative_of_plane_wave() {
        let l = 8.0;
        let k = 2.0 * PI * 3.0 / l;
        let u = GridField::from_fn(64, l, |x| Complex64::from_polar(1.0, k * x)).unwrap();
        let mut g = SpectralGrid::for_field(&u);
        let du = g.derivative(&u);
        let d2u = g.second_derivative(&u);
        for (j, (a, b)) in du.values().iter().zip(d2u.values()).enumerate() {
            let v = u.values()[j];
            assert!((a - Complex64::new(0.0, k) * v).norm() < 1e-12);
            assert!((b + k * k * v).norm() < 1e-12);
        }
    }

    #[test]
    fn mask_keeps_two_thirds() {
        let g = SpectralGrid::new(96usize.next_power_of_two(), 1.0).unwrap();
        let kept = g.dealias_mask().iter().filter(|&&b| b).count();
        assert_eq!(kept, 2 * (128 / 3) + 1);
        assert!(SpectralGrid::new(100, 1.0).is_err());
    }

    #[test]
    fn mismatch_is_reported() {
        let g = SpectralGrid::new(8, 1.0).unwrap();
        let u = GridField::zeros(16, 1.0).unwrap();
        assert!(matches!(g.check(&u), Err(Error::GridMismatch(_))));
    }
}
