use crate::error::{Error, Result};
use crate::field::{GridField, SpectralField};

/// `r·|k|` above this would overflow `e^{r|k|}`.
const MAX_EXPONENT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticNormParams {
    pub r: f64,
    pub p: u32,
}

impl AnalyticNormParams {
    pub fn new(r: f64, p: u32) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::invalid("r", format!("must be > 0, got {r}")));
        }
        Ok(Self { r, p })
    }
}

/// Fourier majorant `Σ_k |c_k| (Σ_{q<=p} |k|^q) e^{|k| r}` of the analytic norm.
pub fn majorant_norm(f: &GridField, params: AnalyticNormParams) -> Result<f64> {
    majorant_of_coeffs(&SpectralField::from_grid(f), params)
}

pub(crate) fn majorant_of_coeffs(c: &SpectralField, params: AnalyticNormParams) -> Result<f64> {
    let m = c.coeffs().len();
    let k_max = (0..m).map(|i| c.wavenumber(i).abs()).fold(0.0, f64::max);
    let exponent = params.r * k_max;
    if exponent > MAX_EXPONENT {
        return Err(Error::MajorantOverflow { exponent });
    }
    let mut acc = 0.0;
    for (i, v) in c.coeffs().iter().enumerate() {
        let k = c.wavenumber(i).abs();
        let mut poly = 0.0;
        let mut kq = 1.0;
        for _ in 0..=params.p {
            poly += kq;
            kq *= k;
        }
        acc += v.norm() * poly * (k * params.r).exp();
    }
    Ok(acc)
}

/// `r_1` and `δ_n = c n^{-2}` with `c = 3 r_1 / π²`, so `Σ δ_n = r_1 / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusSchedule {
    pub r1: f64,
}

impl Default for RadiusSchedule {
    fn default() -> Self {
        Self { r1: 1.0 }
    }
}

impl RadiusSchedule {
    pub fn new(r1: f64) -> Result<Self> {
        if !(r1 > 0.0 && r1.is_finite()) {
            return Err(Error::invalid("r1", format!("must be > 0, got {r1}")));
        }
        Ok(Self { r1 })
    }

    pub fn delta(&self, n: usize) -> f64 {
        let n = n.max(1) as f64;
        3.0 * self.r1 / (std::f64::consts::PI * std::f64::consts::PI * n * n)
    }

    /// `r_n = r_1 - Σ_{m<n} δ_m`.
    pub fn radius(&self, n: usize) -> f64 {
        self.r1 - (1..n.max(1)).map(|m| self.delta(m)).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use std::f64::consts::{E, PI};

    fn field(m: usize, f: impl Fn(f64) -> Complex64) -> GridField {
        GridField::from_fn(m, 2.0 * PI, f).unwrap()
    }

    #[test]
    fn examples() {
        let c = field(32, |_| Complex64::new(0.0, -0.4));
        for &(r, p) in &[(0.3, 0), (1.0, 2), (2.0, 5)] {
            let v = majorant_norm(&c, AnalyticNormParams::new(r, p).unwrap()).unwrap();
            assert!((v - 0.4).abs() < 1e-15);
        }
        let k = 3.0;
        let w = field(16, |x| Complex64::from_polar(1.0, k * x));
        let v = majorant_norm(&w, AnalyticNormParams::new(0.5, 2).unwrap()).unwrap();
        let expect = (1.0 + k + k * k) * (k * 0.5f64).exp();
        assert!((v - expect).abs() < 1e-12 * expect);
        let cos = field(8, |x| Complex64::new(x.cos(), 0.0));
        let v = majorant_norm(&cos, AnalyticNormParams::new(1.0, 0).unwrap()).unwrap();
        assert!((v - E).abs() < 1e-14);
    }

    #[test]
    fn overflow_reported() {
        let w = field(4096, |x| Complex64::new(x.cos(), 0.0));
        assert!(matches!(
            majorant_norm(&w, AnalyticNormParams::new(1.0, 0).unwrap()),
            Err(Error::MajorantOverflow { .. })
        ));
        assert!(AnalyticNormParams::new(0.0, 1).is_err());
    }

    #[test]
    fn schedule_sums_to_half() {
        let s = RadiusSchedule::default();
        assert_eq!(s.radius(1), 1.0);
        assert!((s.radius(2) - (1.0 - 3.0 / (PI * PI))).abs() < 1e-15);
        assert!((s.radius(200_000) - 0.5).abs() < 1e-5);
        assert!((2..50).all(|n| s.radius(n) < s.radius(n - 1)));
    }

    proptest! {
        // ‖f‖(r - δ, p) <= (p+1)(p/e)^p δ^{-p} ‖f‖(r, 0) for schedule steps δ <= 1/e.
        #[test]
        fn shrinking_radius_bounds_derivative_norms(seed in any::<u64>(), n in 1usize..40, p in 0u32..4) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let band = rng.gen_range(1..20i64);
            let modes: Vec<(f64, Complex64)> = (-band..=band)
                .map(|q| (q as f64, Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)))
                .collect();
            let f = field(64, |x| modes.iter().map(|(k, c)| c * Complex64::from_polar(1.0, k * x)).sum());
            let s = RadiusSchedule::default();
            let (r, delta) = (s.radius(n), s.delta(n));
            let lhs = majorant_norm(&f, AnalyticNormParams::new(r - delta, p).unwrap()).unwrap();
            let rhs = majorant_norm(&f, AnalyticNormParams::new(r, 0).unwrap()).unwrap();
            let pf = p as f64;
            let cp = (pf + 1.0) * (pf / E).powf(pf) * (1.0 + 1e-12);
            prop_assert!(lhs <= cp * delta.powi(-(p as i32)) * rhs);
        }
    }
}
