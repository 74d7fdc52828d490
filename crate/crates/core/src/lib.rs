//! Simulation and closed-form calculators for dynamical wave-function
//! collapse models.
//!
//! * [`qmupl`] — the linear-in-position diffusion model, Gaussian sector and grid integrator
//! * [`measurement`] — pointer dynamics, outcome statistics, generic finite-dimensional collapse
//! * [`grw`] — spontaneous-localization jump process
//! * [`csl`] — continuous spontaneous localization rates for clusters and rigid bodies
//! * [`gravity`] — gravity-induced coherence scales
//! * [`interferometry`] — near-field matter-wave interferometer scales
//! * [`bounds`] — experimental parameter bounds and the exclusion map
//! * [`runner`] — configuration-driven batch runs with CSV/JSON output

pub mod bounds;
pub mod catalog;
pub mod constants;
pub mod csl;
pub mod error;
pub mod gaussian;
pub mod gravity;
pub mod grid;
pub mod grw;
pub mod interferometry;
pub mod measurement;
pub mod model;
pub mod noise;
pub mod qmupl;
pub mod runner;
pub mod stats;

pub use error::{Error, Result};
pub use model::{CollapseModelParams, ModelKind};
pub use noise::{NoisePath, NoiseStream};
