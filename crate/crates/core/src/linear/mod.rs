//! Linear lattice Schrödinger evolution: Bessel kernels, their quadrature
//! oracle, stationary-phase asymptotics and phase-aligned data.

mod adversarial;
mod bessel;
mod kernel;
mod quadrature;
mod stationary;

pub use adversarial::{
    adversarial_data, adversarial_data_for, aligned_phases, random_ensemble_second_moment,
    PHASE_FLOOR,
};
pub use bessel::bessel_j_sequence;
pub use kernel::{
    convolve, evolve_at_site, kernel_table, linear_evolve, required_half_width, KernelConvention,
    KernelTable, KERNEL_TAIL_TOL,
};
pub use quadrature::{kernel_integral, KERNEL_QUADRATURE_TOL};
pub use stationary::{
    pairing_check, pairing_check_with, stationary_phase_eval, stationary_phase_eval_with,
    PhaseConvention, StationaryPhaseApprox,
};
