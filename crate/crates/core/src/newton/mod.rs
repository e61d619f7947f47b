//! Newton iteration for the cubic NLS with analytic data on the torus.
//!
//! `ψ_1 = e^{itΔ}ψ0`; each correction `ξ_{n+1}` solves the equation linearized
//! around `ψ_n`, forced by the residual `ψ_n` leaves behind, from zero data.
//! Sizes are measured with a Fourier majorant of the analytic norm at a
//! shrinking radius.

mod iterate;
mod linearized;
mod norm;

pub use iterate::{
    bisect_horizon, first_residual, free_trajectory, newton_iterate, residual, telescoping_defect,
    NewtonOptions, NewtonReport, NewtonRow, NewtonSolution, NewtonState,
};
pub use linearized::{solve_linearized, LinearizedSolution, LinearizedSystem};
pub use norm::{majorant_norm, AnalyticNormParams, RadiusSchedule};
