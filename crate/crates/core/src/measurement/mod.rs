//! Measurement dynamics: a macroscopic pointer coupled to a two-outcome
//! observable, the first-passage diffusion that decides the outcome, and a
//! generic finite-dimensional collapse process.

pub mod generic;
pub mod hitting;
pub mod pointer;

pub use generic::{variance_envelope, GenericCollapse, GenericTrajectory};
pub use hitting::{
    collapse_probability, expected_collapse_s, expected_collapse_s_from, gamma0_from_amplitudes, run_hitting_ensemble,
    simulate_hitting, HittingEnsemble, HittingOutcome, HittingResult,
};
pub use pointer::{collapse_time_chain, pointer_separation, time_change, inverse_time_change, CollapseTimeChain, MeasurementSetup};
