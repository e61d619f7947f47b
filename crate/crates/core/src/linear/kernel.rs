use num_complex::Complex64;

use super::bessel::bessel_j_sequence;
use crate::error::{Error, Result};
use crate::field::{Fourier, LatticeField};

/// Tail mass above which a kernel table is rejected.
pub const KERNEL_TAIL_TOL: f64 = 1e-14;

/// Which generator the kernel belongs to.
///
/// `Laplacian` is `e^{itΔ}` for `Δψ = ψ(x+1) + ψ(x-1) - 2ψ(x)`, with
/// `K_n(t) = e^{-2it} i^n J_n(2t)`. `Hopping` is the pure nearest-neighbour
/// generator `(ψ(x+1) + ψ(x-1))/2`, whose kernel is `F_n(t) = i^n J_n(t)`; it is
/// the normalization of the Fourier integral `(2π)^{-1}∫ e^{it cos θ + inθ} dθ`.
/// The two are related by `K_n(t) = e^{-2it} F_n(2t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelConvention {
    Laplacian,
    Hopping,
}

impl KernelConvention {
    /// Argument of the Bessel functions at time `t`.
    pub fn bessel_argument(self, t: f64) -> f64 {
        match self {
            KernelConvention::Laplacian => 2.0 * t,
            KernelConvention::Hopping => t,
        }
    }

    fn global_phase(self, t: f64) -> Complex64 {
        match self {
            KernelConvention::Laplacian => Complex64::from_polar(1.0, -2.0 * t),
            KernelConvention::Hopping => Complex64::new(1.0, 0.0),
        }
    }
}

/// Half-width beyond which `|J_n(x)|²` summed is far below [`KERNEL_TAIL_TOL`].
pub fn required_half_width(bessel_argument: f64) -> usize {
    let x = bessel_argument.max(0.0);
    (x + 10.0 * x.cbrt()).ceil() as usize + 40
}

/// Kernel values `K_n(t)` for `|n| <= half_width`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    t: f64,
    half_width: usize,
    convention: KernelConvention,
    values: Vec<Complex64>,
}

impl KernelTable {
    pub fn new(t: f64, half_width: usize, convention: KernelConvention) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::invalid(
                "t",
                format!("must be finite and >= 0, got {t}"),
            ));
        }
        let x = convention.bessel_argument(t);
        let n_top = half_width.max(required_half_width(x));
        let j = bessel_j_sequence(x, n_top);
        let tail_mass: f64 = 2.0 * j[half_width + 1..].iter().map(|v| v * v).sum::<f64>();
        if tail_mass > KERNEL_TAIL_TOL {
            return Err(Error::InsufficientHalfWidth {
                t,
                half_width,
                tail_mass,
            });
        }
        let phase = convention.global_phase(t);
        let hw = half_width as i64;
        let values = (-hw..=hw)
            .map(|n| {
                let m = n.unsigned_abs() as usize;
                // i^n J_n is even in n
                phase * i_pow(m as i64) * j[m]
            })
            .collect();
        Ok(Self {
            t,
            half_width,
            convention,
            values,
        })
    }

    /// Table wide enough that the discarded tail is negligible.
    pub fn auto(t: f64, convention: KernelConvention) -> Result<Self> {
        Self::new(
            t,
            required_half_width(convention.bessel_argument(t)),
            convention,
        )
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn convention(&self) -> KernelConvention {
        self.convention
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `K_n(t)`, zero outside the table.
    pub fn get(&self, n: i64) -> Complex64 {
        let i = n + self.half_width as i64;
        if i < 0 || i as usize >= self.values.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[i as usize]
        }
    }

    /// `(n, K_n)` pairs from `-half_width` to `half_width`.
    pub fn entries(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let hw = self.half_width as i64;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (i as i64 - hw, *v))
    }

    /// `Σ_n |K_n|²`.
    pub fn total_mass(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `|Σ_n |K_n|² - 1|`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.total_mass() - 1.0).abs()
    }

    /// `Σ_n |K_n|`.
    pub fn abs_sum(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum()
    }

    /// Test hook: overwrite one entry (used to check that diagnostics catch
    /// a damaged table).
    pub fn corrupt(&mut self, n: i64, value: Complex64) {
        let i = n + self.half_width as i64;
        if i >= 0 && (i as usize) < self.values.len() {
            self.values[i as usize] = value;
        }
    }
}

fn i_pow(n: i64) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `e^{itΔ}` kernel table for the lattice Laplacian.
pub fn kernel_table(t: f64, half_width: usize) -> Result<KernelTable> {
    KernelTable::new(t, half_width, KernelConvention::Laplacian)
}

/// `ψ(t) = K(t) * ψ0` on the sites of `psi0`, treating data outside the
/// truncated lattice as zero.
pub fn linear_evolve(psi0: &LatticeField, t: f64) -> Result<LatticeField> {
    let table = KernelTable::auto(t, KernelConvention::Laplacian)?;
    Ok(convolve(psi0, &table))
}

/// Discrete convolution of `psi0` with a kernel table by zero-padded FFT.
pub fn convolve(psi0: &LatticeField, table: &KernelTable) -> LatticeField {
    let n = psi0.extent();
    let s = psi0.len();
    let h = table.half_width().min(2 * n);
    let klen = 2 * h + 1;
    let size = (s + klen - 1).next_power_of_two();
    let zero = Complex64::new(0.0, 0.0);

    let mut a = vec![zero; size];
    a[..s].copy_from_slice(psi0.values());
    let mut b = vec![zero; size];
    for (j, slot) in b.iter_mut().take(klen).enumerate() {
        *slot = table.get(j as i64 - h as i64);
    }
    let mut fft = Fourier::new(size);
    fft.forward(&mut a);
    fft.forward(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    fft.inverse(&mut a);
    // c[i + j] with i = y + N and j = m + h lands site x = y + m at x + N + h
    let out = a[h..h + s].to_vec();
    LatticeField::from_values(n, out).expect("finite convolution")
}

/// `ψ(t, x) = Σ_y K_{x-y}(t) ψ0(y)` at a single site.
pub fn evolve_at_site(psi0: &LatticeField, table: &KernelTable, x: i64) -> Complex64 {
    psi0.sites().map(|(y, v)| table.get(x - y) * v).sum()
}
