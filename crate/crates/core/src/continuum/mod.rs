//! Mollified continuum NLS on a periodic box, and the cubic wave equation.

mod nls;
mod probe;
mod spectral;
mod wave;

pub use nls::{
    comb_oracle, global_energy, global_energy_signed, global_mass, lawson_trajectory,
    linear_propagate, mollify, picard_solve, regularized_nonlinearity, step_lawson_rk4,
    ContinuumModel, LawsonRk4, PicardSolution, Trajectory, PICARD_MAX_ITER,
};
pub use probe::{
    bootstrap_monitor, local_energy_density, local_energy_probe, local_energy_probes,
    BootstrapReport, LocalEnergyProbe,
};
pub use spectral::{box_integral, dealias_limit, SpectralGrid};
pub use wave::{
    nlw_cone_test, nlw_energy, nlw_step_leapfrog, LeapfrogStepper, WaveNonlinearity, WaveState,
};
