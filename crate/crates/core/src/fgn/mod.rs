//! Fractional Brownian motion: exact path generation and statistical
//! validation of the defining properties.
//!
//! A path `B(t)` with Hurst index `H` is the centered Gaussian process with
//! `B(0) = 0` and covariance
//!
//! ```text
//! E[B(t) B(s)] = (t^{2H} + s^{2H} - |t - s|^{2H}) / 2.
//! ```
//!
//! Both generators target the increment process (fractional Gaussian noise),
//! whose unit-lag covariance is Toeplitz thanks to stationary increments, and
//! cumulatively sum it into the path. That keeps the Cholesky and circulant
//! routes structurally identical and makes `H = 1/2` an exact random walk.

mod generate;
mod hurst;

pub use generate::{generate_cholesky, generate_circulant, CholeskyGenerator, CirculantGenerator, FgnSpectrum};
pub use hurst::{estimate_hurst, estimate_hurst_series, HurstEstimate};

use crate::error::{Error, Result};

/// Validated Hurst index in `[1/2, 1)`.
///
/// `H = 1/2` (plain Brownian motion) is admitted only as a cross-check
/// channel for the generators; operations built on the long-memory kernel
/// reject it via [`HurstParameter::require_long_memory`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurstParameter(f64);

impl HurstParameter {
    pub fn new(h: f64) -> Result<Self> {
        if !h.is_finite() || !(0.5..1.0).contains(&h) {
            return Err(Error::InvalidHurst(h));
        }
        Ok(Self(h))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// True for the classical Brownian cross-check value `H = 1/2`.
    pub fn is_classical(self) -> bool {
        self.0 == 0.5
    }

    /// Reject the classical value for operations stated only for `H > 1/2`.
    pub fn require_long_memory(self, op: &'static str) -> Result<()> {
        if self.is_classical() {
            return Err(Error::ClassicalHurstRejected { op });
        }
        Ok(())
    }
}

/// Uniform grid `t_i = i * dt` on `[0, t_end]` with `dt = t_end / n_steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    t_end: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, n_steps: usize) -> Result<Self> {
        if !t_end.is_finite() || t_end <= 0.0 {
            return Err(Error::InvalidGrid(format!("t_end = {t_end} must be positive")));
        }
        if n_steps == 0 {
            return Err(Error::InvalidGrid("n_steps must be at least 1".into()));
        }
        Ok(Self { t_end, n_steps })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Number of nodes, `n_steps + 1`.
    pub fn n_nodes(&self) -> usize {
        self.n_steps + 1
    }

    pub fn dt(&self) -> f64 {
        self.t_end / self.n_steps as f64
    }

    /// Node `t_i = i * dt`; `node(0) == 0` exactly.
    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.dt()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_nodes()).map(move |i| self.node(i))
    }
}

/// A sampled fractional Brownian motion trajectory on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FbmPath {
    grid: TimeGrid,
    values: Vec<f64>,
    h: HurstParameter,
}

impl FbmPath {
    /// Wrap raw values; `values[0]` must be 0 and the length `n_steps + 1`.
    pub fn new(grid: TimeGrid, values: Vec<f64>, h: HurstParameter) -> Result<Self> {
        if values.len() != grid.n_nodes() {
            return Err(Error::LengthMismatch {
                expected: grid.n_nodes(),
                got: values.len(),
            });
        }
        if values[0] != 0.0 {
            return Err(Error::InvalidGrid(format!(
                "path must start at 0, got {}",
                values[0]
            )));
        }
        Ok(Self { grid, values, h })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn hurst(&self) -> HurstParameter {
        self.h
    }

    /// Consecutive increments `values[i+1] - values[i]`, length `n_steps`.
    pub fn increments(&self) -> Vec<f64> {
        path_increments(self)
    }
}

/// Covariance `E[B(t) B(s)] = (t^{2H} + s^{2H} - |t-s|^{2H}) / 2`.
///
/// Symmetric in `(t, s)` exactly (the expression is evaluated the same way
/// for both orders).
pub fn fbm_covariance(t: f64, s: f64, h: HurstParameter) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    if !s.is_finite() || s < 0.0 {
        return Err(Error::NegativeTime(s));
    }
    let two_h = 2.0 * h.value();
    Ok(0.5 * (t.powf(two_h) + s.powf(two_h) - (t - s).abs().powf(two_h)))
}

/// Autocovariance of unit-lag fractional Gaussian noise,
/// `rho(n) = ((n+1)^{2H} + (n-1)^{2H} - 2 n^{2H}) / 2`, with `rho(0) = 1`.
pub fn fgn_autocovariance(n: u64, h: HurstParameter) -> f64 {
    let two_h = 2.0 * h.value();
    let n = n as f64;
    0.5 * ((n + 1.0).powf(two_h) + (n - 1.0).abs().powf(two_h) - 2.0 * n.powf(two_h))
}

/// Increment vector of a path (telescopes to `values[n] - values[0]`).
pub fn path_increments(path: &FbmPath) -> Vec<f64> {
    path.values.windows(2).map(|w| w[1] - w[0]).collect()
}

/// An empirical moment together with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Empirical `2k`-th moment of lag increments over a path ensemble.
///
/// Within each path the moment is averaged over all overlapping lag windows;
/// the standard error treats the per-path averages as independent samples,
/// which they are across paths.
pub fn increment_moment(paths: &[FbmPath], k: u32, lag: usize) -> Result<MomentEstimate> {
    if paths.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    if k == 0 {
        return Err(Error::InvalidConfig("moment order k must be positive".into()));
    }
    if lag == 0 {
        return Err(Error::InvalidConfig("lag must be positive".into()));
    }
    let grid = paths[0].grid().clone();
    let h = paths[0].hurst();
    if lag > grid.n_steps() {
        return Err(Error::InvalidConfig(format!(
            "lag {lag} exceeds n_steps {}",
            grid.n_steps()
        )));
    }
    let mut per_path = Vec::with_capacity(paths.len());
    for p in paths {
        if p.grid() != &grid || p.hurst() != h {
            return Err(Error::DimensionMismatch(
                "ensemble paths must share one grid and Hurst index".into(),
            ));
        }
        let v = p.values();
        let mut acc = 0.0;
        let count = v.len() - lag;
        for i in 0..count {
            let d = v[i + lag] - v[i];
            acc += d.powi(2 * k as i32);
        }
        per_path.push(acc / count as f64);
    }
    let (value, std_error) = crate::stats::mean_and_std_error(&per_path);
    Ok(MomentEstimate { value, std_error })
}

/// Theoretical even moment of a Gaussian lag increment:
/// `E[(dB)^{2k}] = (2k-1)!! * tau^{2Hk}`.
pub fn theoretical_even_moment(k: u32, tau: f64, h: HurstParameter) -> f64 {
    let mut double_factorial = 1.0;
    let mut i = 2 * k as i64 - 1;
    while i > 1 {
        double_factorial *= i as f64;
        i -= 2;
    }
    double_factorial * tau.powf(2.0 * h.value() * k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn h(v: f64) -> HurstParameter {
        HurstParameter::new(v).unwrap()
    }

    #[test]
    fn hurst_bounds_enforced() {
        assert!(HurstParameter::new(0.499).is_err());
        assert!(HurstParameter::new(1.0).is_err());
        assert!(HurstParameter::new(f64::NAN).is_err());
        assert!(HurstParameter::new(0.5).unwrap().is_classical());
        assert!(!h(0.75).is_classical());
        assert!(h(0.5).require_long_memory("test").is_err());
        assert!(h(0.75).require_long_memory("test").is_ok());
    }

    #[test]
    fn grid_invariants() {
        assert!(TimeGrid::new(0.0, 4).is_err());
        assert!(TimeGrid::new(1.0, 0).is_err());
        let g = TimeGrid::new(2.0, 4).unwrap();
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.dt(), 0.5);
        let nodes: Vec<f64> = g.nodes().collect();
        assert_eq!(nodes.len(), 5);
        assert!(nodes.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn covariance_at_unit_time_is_one() {
        // Var B(1) = 1^{2H} for any H.
        assert_eq!(fbm_covariance(1.0, 1.0, h(0.75)).unwrap(), 1.0);
    }

    #[test]
    fn covariance_vanishes_at_origin() {
        assert_eq!(fbm_covariance(0.0, 5.0, h(0.6)).unwrap(), 0.0);
    }

    #[test]
    fn covariance_closed_form_value() {
        // (2^{1.5} + 1 - 1) / 2 = sqrt(2), high-precision reference value.
        assert_relative_eq!(
            fbm_covariance(2.0, 1.0, h(0.75)).unwrap(),
            1.4142135623730951,
            epsilon = 1e-15
        );
    }

    #[test]
    fn covariance_rejects_negative_time() {
        assert!(fbm_covariance(-1.0, 1.0, h(0.75)).is_err());
        assert!(fbm_covariance(1.0, -0.5, h(0.75)).is_err());
    }

    #[test]
    fn autocovariance_values() {
        // Brownian increments are independent.
        assert_eq!(fgn_autocovariance(1, h(0.5)), 0.0);
        // Unit-step increment variance is 1^{2H}.
        assert_eq!(fgn_autocovariance(0, h(0.7)), 1.0);
        // (2^{1.5} - 2) / 2 = sqrt(2) - 1.
        assert_relative_eq!(
            fgn_autocovariance(1, h(0.75)),
            0.41421356237309515,
            epsilon = 1e-15
        );
    }

    #[test]
    fn path_checks_shape_and_origin() {
        let g = TimeGrid::new(1.0, 2).unwrap();
        assert!(FbmPath::new(g.clone(), vec![0.0, 1.0], h(0.6)).is_err());
        assert!(FbmPath::new(g.clone(), vec![1.0, 1.0, 2.0], h(0.6)).is_err());
        assert!(FbmPath::new(g, vec![0.0, 1.0, 2.0], h(0.6)).is_ok());
    }

    #[test]
    fn increments_telescope() {
        let g = TimeGrid::new(1.0, 3).unwrap();
        let p = FbmPath::new(g, vec![0.0, 0.5, -0.25, 2.0], h(0.7)).unwrap();
        let inc = path_increments(&p);
        assert_eq!(inc.len(), 3);
        assert_relative_eq!(inc.iter().sum::<f64>(), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_path_has_zero_increments_and_moment() {
        let g = TimeGrid::new(1.0, 4).unwrap();
        let p = FbmPath::new(g, vec![0.0; 5], h(0.75)).unwrap();
        assert!(path_increments(&p).iter().all(|&x| x == 0.0));
        let m = increment_moment(&[p], 1, 1).unwrap();
        assert_eq!(m.value, 0.0);
        assert_eq!(m.std_error, 0.0);
    }

    #[test]
    fn moment_rejects_empty_ensemble() {
        assert!(matches!(increment_moment(&[], 1, 1), Err(Error::EmptyEnsemble)));
    }

    #[test]
    fn theoretical_moments() {
        // k=1: variance tau^{2H}; k=2: 3 sigma^4.
        assert_relative_eq!(theoretical_even_moment(1, 1.0, h(0.75)), 1.0);
        assert_relative_eq!(theoretical_even_moment(2, 1.0, h(0.75)), 3.0);
        assert_relative_eq!(
            theoretical_even_moment(1, 0.01, h(0.6)),
            0.01f64.powf(1.2),
            epsilon = 1e-15
        );
    }
}
