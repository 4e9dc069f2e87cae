//! Simulation of stochastic systems driven by long-memory fractional noise.
//!
//! The crate provides, bottom up:
//!
//! * [`fgn`] — exact fractional Brownian motion generators (Cholesky and
//!   circulant embedding) with statistical validation helpers;
//! * [`integrator`] — forward/backward/symmetric pathwise integrals and an
//!   Euler-type solver for epsilon-scaled systems;
//! * [`averaging`] — construction of autonomous averaged coefficients by
//!   window quadrature and assessment of the averaging quality;
//! * [`experiments`] — paired Monte Carlo ensembles comparing a system with
//!   its averaged counterpart on shared noise, with epsilon sweeps;
//! * [`verify`] — the runnable check suite behind the CLI and the
//!   acceptance tests.
//!
//! Everything is deterministic given a master seed, independent of thread
//! count.

pub mod averaging;
pub mod error;
pub mod experiments;
pub mod fgn;
pub mod integrator;
pub mod rng;
pub mod stats;
pub mod verify;

pub use averaging::{
    build_averaged_system, check_conditions, rms_average_diffusion, time_average_drift,
    AveragedSystem, ConditionReport, DiffusionAveraging, Provenance,
};
pub use error::{Error, Result};
pub use experiments::{
    epsilon_sweep, example1_preset, example2_preset, run_paired, ExperimentConfig, PairedEnsemble,
    PresetCase, SweepResult, SweepRow, SystemSpec,
};
pub use fgn::{
    estimate_hurst, estimate_hurst_series, fbm_covariance, fgn_autocovariance, generate_cholesky,
    generate_circulant, increment_moment, path_increments, CholeskyGenerator, CirculantGenerator,
    FbmPath, FgnSpectrum, HurstEstimate, HurstParameter, MomentEstimate, TimeGrid,
};
pub use integrator::{
    euler_solve, ou_exact_solution, pathwise_integral, second_moment_deterministic, IntegralKind,
    SdeSystem, Trajectory,
};
