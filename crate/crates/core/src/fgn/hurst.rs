//! Aggregated-variance Hurst estimation.
//!
//! The mean-square lag-`m` increment of a path scales as `(m dt)^{2H}`, so
//! an ordinary least squares fit of `log` mean-square increments against
//! `log(m dt)` over dyadic lags has slope `2H`. The mean square is taken
//! uncentered (increments have zero mean), which ties the estimate directly
//! to the increment-variance law and makes a deterministic linear ramp come
//! out at exactly `H = 1`.

use crate::error::{Error, Result};
use crate::fgn::FbmPath;
use crate::stats;

const MIN_SERIES_LEN: usize = 64;
const MAX_LAG: usize = 32;

/// Result of the aggregated-variance regression.
#[derive(Debug, Clone)]
pub struct HurstEstimate {
    /// Slope / 2 of the log-log regression.
    pub h: f64,
    /// True when the series behaves like a smooth deterministic trend
    /// (estimate at or above 1), where the Hurst scale is meaningless.
    pub degenerate: bool,
    /// Lags used, in time units (`m * dt`).
    pub lags: Vec<f64>,
    /// Mean-square increments per lag.
    pub mean_squares: Vec<f64>,
}

/// Estimate the Hurst index of a sampled path.
pub fn estimate_hurst(path: &FbmPath) -> Result<HurstEstimate> {
    estimate_hurst_series(path.values(), path.grid().dt())
}

/// Estimate the Hurst index of a raw uniformly sampled series.
pub fn estimate_hurst_series(values: &[f64], dt: f64) -> Result<HurstEstimate> {
    if values.len() < MIN_SERIES_LEN {
        return Err(Error::SeriesTooShort {
            got: values.len(),
            min: MIN_SERIES_LEN,
        });
    }
    if values.iter().any(|v| !v.is_finite()) || !dt.is_finite() || dt <= 0.0 {
        return Err(Error::NonFiniteInput);
    }

    let mut lags = Vec::new();
    let mut mean_squares = Vec::new();
    let mut m = 1;
    while m <= MAX_LAG && m <= (values.len() - 1) / 8 {
        let mut acc = 0.0;
        let count = values.len() - m;
        for i in 0..count {
            let d = values[i + m] - values[i];
            acc += d * d;
        }
        let ms = acc / count as f64;
        if ms <= 0.0 {
            return Err(Error::DegenerateSeries { lag: m });
        }
        lags.push(m as f64 * dt);
        mean_squares.push(ms);
        m *= 2;
    }

    let log_x: Vec<f64> = lags.iter().map(|l| l.ln()).collect();
    let log_y: Vec<f64> = mean_squares.iter().map(|v| v.ln()).collect();
    let (slope, _) = stats::ols_line(&log_x, &log_y);
    let h = slope / 2.0;
    Ok(HurstEstimate {
        h,
        degenerate: h >= 1.0 - 1e-6,
        lags,
        mean_squares,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgn::{HurstParameter, TimeGrid};
    use approx::assert_relative_eq;

    #[test]
    fn too_short_series_is_rejected() {
        let values = vec![0.0; 63];
        assert!(matches!(
            estimate_hurst_series(&values, 0.1),
            Err(Error::SeriesTooShort { got: 63, min: 64 })
        ));
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let mut values = vec![0.0; 128];
        values[100] = f64::NAN;
        assert!(matches!(
            estimate_hurst_series(&values, 0.1),
            Err(Error::NonFiniteInput)
        ));
    }

    #[test]
    fn zero_series_is_degenerate_error() {
        let values = vec![0.0; 128];
        assert!(matches!(
            estimate_hurst_series(&values, 0.1),
            Err(Error::DegenerateSeries { lag: 1 })
        ));
    }

    #[test]
    fn linear_ramp_estimates_h_one_and_flags_degenerate() {
        let grid = TimeGrid::new(1.0, 256).unwrap();
        let values: Vec<f64> = grid.nodes().collect();
        let h = HurstParameter::new(0.75).unwrap();
        let path = {
            let mut v = values;
            v[0] = 0.0;
            FbmPath::new(grid, v, h).unwrap()
        };
        let est = estimate_hurst(&path).unwrap();
        assert_relative_eq!(est.h, 1.0, epsilon = 1e-9);
        assert!(est.degenerate);
    }
}
