//! Experiment orchestration for the `bnls` library: configuration, runs,
//! sweeps, CSV and SVG output, growth fits and the acceptance suite.

pub mod acceptance;
pub mod config;
pub mod engine;
pub mod error;
pub mod fit;
pub mod plot;
pub mod run;
pub mod series;
pub mod sweep;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
