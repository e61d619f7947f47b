use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Planned forward/inverse DFT pair of a fixed length.
///
/// `forward` is unnormalized, `inverse` divides by the length, so
/// `inverse(forward(x)) == x` up to roundoff.
#[derive(Clone)]
pub struct Fourier {
    len: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl fmt::Debug for Fourier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fourier").field("len", &self.len).finish()
    }
}

impl Fourier {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(len);
        let inv = planner.plan_fft_inverse(len);
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        Self {
            len,
            fwd,
            inv,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn forward(&mut self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.fwd.process_with_scratch(buf, &mut self.scratch);
    }

    pub fn inverse(&mut self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.inv.process_with_scratch(buf, &mut self.scratch);
        let scale = 1.0 / self.len as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }
}

impl Fourier {
    /// Inverse transform without the `1/len` factor.
    pub fn inverse_unscaled(&mut self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.inv.process_with_scratch(buf, &mut self.scratch);
    }
}

/// Signed mode number of FFT-ordered index `i` for a transform of length `len`.
pub fn signed_mode(i: usize, len: usize) -> i64 {
    if i < len.div_ceil(2) {
        i as i64
    } else {
        i as i64 - len as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_modes_even_and_odd() {
        let even: Vec<i64> = (0..8).map(|i| signed_mode(i, 8)).collect();
        assert_eq!(even, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        let odd: Vec<i64> = (0..5).map(|i| signed_mode(i, 5)).collect();
        assert_eq!(odd, vec![0, 1, 2, -2, -1]);
    }

    #[test]
    fn inverse_undoes_forward() {
        let mut f = Fourier::new(12);
        let orig: Vec<Complex64> = (0..12)
            .map(|j| Complex64::new((j as f64).sin(), (j as f64 * 0.3).cos()))
            .collect();
        let mut buf = orig.clone();
        f.forward(&mut buf);
        f.inverse(&mut buf);
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
