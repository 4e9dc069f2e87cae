//! Discrete pathwise stochastic integrals against fractional Brownian
//! motion and an Euler-type solver for the epsilon-scaled system
//!
//! ```text
//! X(t) = X(0) + eps^{2H} int_0^t b(s, X(s)) ds
//!             + eps^{H}  int_0^t sigma(s, X(s)) dB(s),
//! ```
//!
//! where the stochastic term is read in the forward, backward or symmetric
//! sense. For `H > 1/2` and Lipschitz integrands the three readings share one
//! limit, which the coincidence tests exercise on generated paths.

mod euler;
mod integral;

pub use euler::{euler_solve, ou_exact_solution};
pub use integral::{pathwise_integral, second_moment_deterministic};

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::fgn::{HurstParameter, TimeGrid};
use crate::rng::substream;

/// Endpoint rule used for the stochastic term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegralKind {
    /// Left endpoint (Ito-style reading).
    Forward,
    /// Right endpoint.
    Backward,
    /// Trapezoidal (Stratonovich-style reading).
    Symmetric,
}

impl IntegralKind {
    pub const ALL: [IntegralKind; 3] = [
        IntegralKind::Forward,
        IntegralKind::Backward,
        IntegralKind::Symmetric,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IntegralKind::Forward => "forward",
            IntegralKind::Backward => "backward",
            IntegralKind::Symmetric => "symmetric",
        }
    }
}

impl fmt::Display for IntegralKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Time-dependent coefficient `f(t, x)` writing its value into `out`
/// (length `d` for drifts, row-major `d x m` for diffusions).
pub type CoefficientFn = dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync;

/// Autonomous coefficient `f(x)`.
pub type AutonomousFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

/// An epsilon-scaled system: drift `b(t, x)`, diffusion `sigma(t, x)`, the
/// Hurst index of the driving noise and the scale parameter.
///
/// The scaling exponents are fixed at `2H` for the drift and `H` for the
/// diffusion and live only in [`SdeSystem::drift_scale`] /
/// [`SdeSystem::diffusion_scale`], so replacing `(eps, b, sigma)` by
/// `(1, eps^{2H} b, eps^{H} sigma)` reproduces trajectories bit for bit.
#[derive(Clone)]
pub struct SdeSystem {
    dim_state: usize,
    dim_noise: usize,
    drift: Arc<CoefficientFn>,
    diffusion: Arc<CoefficientFn>,
    h: HurstParameter,
    epsilon: f64,
    epsilon_0: f64,
}

impl SdeSystem {
    pub fn new(
        dim_state: usize,
        dim_noise: usize,
        drift: Arc<CoefficientFn>,
        diffusion: Arc<CoefficientFn>,
        h: HurstParameter,
        epsilon: f64,
    ) -> Result<Self> {
        h.require_long_memory("SdeSystem")?;
        if dim_state == 0 || dim_noise == 0 {
            return Err(Error::DimensionMismatch(
                "state and noise dimensions must be positive".into(),
            ));
        }
        let epsilon_0 = 1.0;
        if !(epsilon > 0.0 && epsilon <= epsilon_0) {
            return Err(Error::InvalidEpsilon { epsilon, epsilon_0 });
        }
        Ok(Self {
            dim_state,
            dim_noise,
            drift,
            diffusion,
            h,
            epsilon,
            epsilon_0,
        })
    }

    /// Same system with a different scale parameter.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= self.epsilon_0) {
            return Err(Error::InvalidEpsilon {
                epsilon,
                epsilon_0: self.epsilon_0,
            });
        }
        let mut out = self.clone();
        out.epsilon = epsilon;
        Ok(out)
    }

    /// Raise the admissible epsilon ceiling.
    pub fn with_epsilon_0(mut self, epsilon_0: f64) -> Result<Self> {
        if !(epsilon_0 > 0.0) || self.epsilon > epsilon_0 {
            return Err(Error::InvalidEpsilon {
                epsilon: self.epsilon,
                epsilon_0,
            });
        }
        self.epsilon_0 = epsilon_0;
        Ok(self)
    }

    pub fn dim_state(&self) -> usize {
        self.dim_state
    }

    pub fn dim_noise(&self) -> usize {
        self.dim_noise
    }

    pub fn hurst(&self) -> HurstParameter {
        self.h
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn epsilon_0(&self) -> f64 {
        self.epsilon_0
    }

    /// Drift prefactor `eps^{2H}`.
    pub fn drift_scale(&self) -> f64 {
        self.epsilon.powf(2.0 * self.h.value())
    }

    /// Diffusion prefactor `eps^{H}`.
    pub fn diffusion_scale(&self) -> f64 {
        self.epsilon.powf(self.h.value())
    }

    pub fn eval_drift(&self, t: f64, x: &[f64], out: &mut [f64]) {
        (self.drift)(t, x, out);
    }

    pub fn eval_diffusion(&self, t: f64, x: &[f64], out: &mut [f64]) {
        (self.diffusion)(t, x, out);
    }

    pub fn drift_fn(&self) -> Arc<CoefficientFn> {
        Arc::clone(&self.drift)
    }

    pub fn diffusion_fn(&self) -> Arc<CoefficientFn> {
        Arc::clone(&self.diffusion)
    }

    /// Finite-sample regularity probe on a state box.
    ///
    /// Regularity of user coefficients cannot be proven from a black box;
    /// this samples `(t, x)` pairs, fails on any non-finite value and
    /// reports difference-quotient estimates of the Lipschitz constants.
    /// It is a spot check, not a proof.
    pub fn spot_check(
        &self,
        state_box: &[(f64, f64)],
        t_end: f64,
        samples: usize,
    ) -> Result<SpotCheckReport> {
        if state_box.len() != self.dim_state {
            return Err(Error::DimensionMismatch(format!(
                "state box has {} intervals for dimension {}",
                state_box.len(),
                self.dim_state
            )));
        }
        let mut rng = substream(0x5b07_c8ec, 0);
        let d = self.dim_state;
        let dm = self.dim_state * self.dim_noise;
        let mut b = vec![0.0; d];
        let mut b2 = vec![0.0; d];
        let mut s = vec![0.0; dm];
        let mut s2 = vec![0.0; dm];
        let mut x = vec![0.0; d];
        let mut y = vec![0.0; d];
        let mut report = SpotCheckReport::default();
        report.samples = samples;
        for _ in 0..samples {
            let t = rng.random_range(0.0..=t_end);
            for (xi, &(lo, hi)) in x.iter_mut().zip(state_box) {
                *xi = rng.random_range(lo..=hi);
            }
            for (yi, &(lo, hi)) in y.iter_mut().zip(state_box) {
                *yi = rng.random_range(lo..=hi);
            }
            self.eval_drift(t, &x, &mut b);
            self.eval_drift(t, &y, &mut b2);
            self.eval_diffusion(t, &x, &mut s);
            self.eval_diffusion(t, &y, &mut s2);
            if b.iter().chain(&b2).chain(&s).chain(&s2).any(|v| !v.is_finite()) {
                return Err(Error::CoefficientCheck(format!(
                    "non-finite coefficient value at t = {t}, x = {x:?}"
                )));
            }
            let dx = euclidean_distance(&x, &y);
            if dx > 1e-12 {
                report.drift_lipschitz = report
                    .drift_lipschitz
                    .max(euclidean_distance(&b, &b2) / dx);
                report.diffusion_lipschitz = report
                    .diffusion_lipschitz
                    .max(euclidean_distance(&s, &s2) / dx);
            }
            report.max_drift = report.max_drift.max(euclidean_norm(&b));
            report.max_diffusion = report.max_diffusion.max(euclidean_norm(&s));
        }
        Ok(report)
    }
}

/// Sampled regularity estimates from [`SdeSystem::spot_check`].
#[derive(Debug, Clone, Default)]
pub struct SpotCheckReport {
    pub drift_lipschitz: f64,
    pub diffusion_lipschitz: f64,
    pub max_drift: f64,
    pub max_diffusion: f64,
    pub samples: usize,
}

pub(crate) fn euclidean_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// A solved trajectory: states at every grid node, row-major
/// `(n_steps + 1) x d`, with `state(0)` equal to the initial condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: TimeGrid,
    dim: usize,
    states: Vec<f64>,
}

impl Trajectory {
    pub(crate) fn from_states(grid: TimeGrid, dim: usize, states: Vec<f64>) -> Self {
        debug_assert_eq!(states.len(), grid.n_nodes() * dim);
        Self { grid, dim, states }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    pub fn states(&self) -> &[f64] {
        &self.states
    }

    /// Scalar view for one-dimensional systems.
    pub fn scalar_values(&self) -> &[f64] {
        assert_eq!(self.dim, 1, "scalar view requires a 1-d trajectory");
        &self.states
    }
}
