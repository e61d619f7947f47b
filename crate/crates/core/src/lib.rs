//! Simulation engines for nonlinear Schrödinger dynamics with bounded,
//! non-decaying initial data.
//!
//! The crate is split by engine:
//!
//! * [`field`]: shared lattice/grid containers, cutoffs, weights, mollifiers
//!   and initial-data generators.
//! * [`lattice`]: split-step evolution of the lattice NLS together with the
//!   weighted local mass/energy diagnostics.
//! * [`linear`]: the exact Bessel-kernel propagator of the linear lattice
//!   equation, its quadrature oracle, stationary-phase asymptotics and the
//!   phase-aligned lower-bound construction.
//! * [`continuum`]: the mollified NLS on a periodic spectral grid, Picard
//!   iteration, local-energy probes and the cubic wave equation.
//! * [`newton`]: Newton iteration for short-time solutions with analytic data.

pub mod continuum;
pub mod error;
pub mod field;
pub mod lattice;
pub mod linear;
pub mod newton;

pub use error::{Error, Result};
pub use num_complex::Complex64;
