use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::kernel::{required_half_width, KernelConvention, KernelTable};
use crate::error::{Error, Result};
use crate::field::LatticeField;

/// Kernel magnitudes below this have no usable phase.
pub const PHASE_FLOOR: f64 = 1e-300;

/// Unit-modulus data whose linear evolution adds up constructively at the
/// origin at time `t0`: `a_n = conj(K_n(t0)) / |K_n(t0)|`.
pub fn adversarial_data(t0: f64, extent: usize) -> Result<LatticeField> {
    adversarial_data_for(t0, extent, KernelConvention::Laplacian)
}

pub fn adversarial_data_for(
    t0: f64,
    extent: usize,
    convention: KernelConvention,
) -> Result<LatticeField> {
    let need = required_half_width(convention.bessel_argument(t0));
    if extent < need {
        return Err(Error::invalid(
            "extent",
            format!("need at least {need} sites on each side for t0 = {t0}"),
        ));
    }
    let table = KernelTable::new(t0, need, convention)?;
    Ok(aligned_phases(&table, extent))
}

/// `a_n = conj(K_n)/|K_n|` for the given table on `{-N, …, N}`.
pub fn aligned_phases(table: &KernelTable, extent: usize) -> LatticeField {
    LatticeField::from_fn(extent, |n| {
        let k = table.get(n);
        let m = k.norm();
        if m < PHASE_FLOOR {
            Complex64::new(0.0, 0.0)
        } else {
            k.conj() / m
        }
    })
}

/// Monte Carlo estimate of `E|ψ(t,0)|²` for `ψ0 = A Σ_j e^{iθ_j} δ_j`.
///
/// Sample `s` draws from the ChaCha8 stream `s` of `seed`, so the estimate
/// does not depend on how the samples are scheduled across threads.
pub fn random_ensemble_second_moment(
    t: f64,
    amplitude: f64,
    num_samples: usize,
    seed: u64,
) -> Result<f64> {
    if num_samples < 1 {
        return Err(Error::invalid("num_samples", "must be >= 1"));
    }
    let table = KernelTable::auto(t, KernelConvention::Laplacian)?;
    let table = &table;
    let per_sample: Vec<f64> = (0..num_samples as u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s);
            let psi: Complex64 = table
                .entries()
                .map(|(_, k)| k * Complex64::from_polar(amplitude, 2.0 * PI * rng.gen::<f64>()))
                .sum();
            psi.norm_sqr()
        })
        .collect();
    Ok(per_sample.iter().sum::<f64>() / num_samples as f64)
}
