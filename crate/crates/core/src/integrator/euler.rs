//! Euler-type schemes for the epsilon-scaled system, one per integral kind,
//! plus the exact mean-reverting solution used as a solver oracle.

use crate::error::{Error, Result};
use crate::fgn::{FbmPath, HurstParameter};
use crate::integrator::{IntegralKind, SdeSystem, Trajectory};

/// Solve the system along the given driving paths (one per noise column).
///
/// Per step, with pre-scaled coefficients `b* = eps^{2H} b` and
/// `s* = eps^{H} sigma`:
///
/// * forward: explicit Euler, `x + b*(t_i, x) dt + s*(t_i, x) dB_i`;
/// * symmetric: Heun predictor-corrector, the forward step predicting `x~`
///   and the update averaging `(b*, s*)` at `(t_i, x)` and `(t_{i+1}, x~)`;
/// * backward: the forward predictor with the diffusion replaced by
///   `s*(t_{i+1}, x~)` (right-endpoint integrand, drift untouched).
///
/// The scales multiply coefficient values entrywise at evaluation time, so
/// folding `eps` into the coefficients and solving with `eps = 1` gives
/// bit-identical trajectories.
pub fn euler_solve(
    system: &SdeSystem,
    x0: &[f64],
    paths: &[FbmPath],
    kind: IntegralKind,
) -> Result<Trajectory> {
    let d = system.dim_state();
    let m = system.dim_noise();
    if x0.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "x0 has length {} for state dimension {d}",
            x0.len()
        )));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergence { step: 0 });
    }
    if paths.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{} driving paths supplied for noise dimension {m}",
            paths.len()
        )));
    }
    let grid = paths[0].grid().clone();
    for p in paths {
        if p.grid() != &grid {
            return Err(Error::DimensionMismatch(
                "driving paths must share one grid".into(),
            ));
        }
        if p.hurst() != system.hurst() {
            return Err(Error::DimensionMismatch(
                "driving path Hurst index differs from the system".into(),
            ));
        }
    }

    let n = grid.n_steps();
    let dt = grid.dt();
    let drift_scale = system.drift_scale();
    let diff_scale = system.diffusion_scale();

    let mut states = Vec::with_capacity((n + 1) * d);
    states.extend_from_slice(x0);

    let mut x = x0.to_vec();
    let mut x_pred = vec![0.0; d];
    let mut b0 = vec![0.0; d];
    let mut b1 = vec![0.0; d];
    let mut s0 = vec![0.0; d * m];
    let mut s1 = vec![0.0; d * m];
    let mut db = vec![0.0; m];

    for i in 0..n {
        let t0 = grid.node(i);
        let t1 = grid.node(i + 1);
        for (j, p) in paths.iter().enumerate() {
            db[j] = p.values()[i + 1] - p.values()[i];
        }

        system.eval_drift(t0, &x, &mut b0);
        system.eval_diffusion(t0, &x, &mut s0);
        scale_in_place(&mut b0, drift_scale);
        scale_in_place(&mut s0, diff_scale);

        match kind {
            IntegralKind::Forward => {
                for r in 0..d {
                    x[r] += b0[r] * dt + dot_noise(&s0, r, m, &db);
                }
            }
            IntegralKind::Symmetric => {
                for r in 0..d {
                    x_pred[r] = x[r] + b0[r] * dt + dot_noise(&s0, r, m, &db);
                }
                system.eval_drift(t1, &x_pred, &mut b1);
                system.eval_diffusion(t1, &x_pred, &mut s1);
                scale_in_place(&mut b1, drift_scale);
                scale_in_place(&mut s1, diff_scale);
                for r in 0..d {
                    let bavg = 0.5 * (b0[r] + b1[r]);
                    let mut noise = 0.0;
                    for j in 0..m {
                        noise += 0.5 * (s0[r * m + j] + s1[r * m + j]) * db[j];
                    }
                    x[r] += bavg * dt + noise;
                }
            }
            IntegralKind::Backward => {
                for r in 0..d {
                    x_pred[r] = x[r] + b0[r] * dt + dot_noise(&s0, r, m, &db);
                }
                system.eval_diffusion(t1, &x_pred, &mut s1);
                scale_in_place(&mut s1, diff_scale);
                for r in 0..d {
                    x[r] += b0[r] * dt + dot_noise(&s1, r, m, &db);
                }
            }
        }

        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { step: i + 1 });
        }
        states.extend_from_slice(&x);
    }

    Ok(Trajectory::from_states(grid, d, states))
}

fn scale_in_place(v: &mut [f64], s: f64) {
    for x in v {
        *x = s * *x;
    }
}

#[inline]
fn dot_noise(sigma: &[f64], row: usize, m: usize, db: &[f64]) -> f64 {
    let mut acc = 0.0;
    for j in 0..m {
        acc += sigma[row * m + j] * db[j];
    }
    acc
}

/// Grid-sampled exact solution of the scalar mean-reverting system
/// `dZ = -eps^{2H} lambda Z dt + eps^{H} dB` driven by the given path:
///
/// ```text
/// z(t_i) = e^{-a lambda t_i} x0
///        + c * sum_{j < i} e^{-a lambda (t_i - t_{j+1/2})} dB_j,
/// ```
///
/// with `a = eps^{2H}`, `c = eps^{H}` and midpoint kernel nodes. Evaluated
/// by the equivalent one-step recursion, it serves as the integrating-factor
/// oracle for [`euler_solve`] on averaged systems with linear drift.
pub fn ou_exact_solution(
    lambda: f64,
    epsilon: f64,
    h: HurstParameter,
    x0: f64,
    path: &FbmPath,
) -> Trajectory {
    let grid = path.grid().clone();
    let a = epsilon.powf(2.0 * h.value());
    let c = epsilon.powf(h.value());
    let dt = grid.dt();
    let decay = (-a * lambda * dt).exp();
    let half_decay = (-a * lambda * (dt / 2.0)).exp();

    let v = path.values();
    let mut states = Vec::with_capacity(grid.n_nodes());
    let mut z = x0;
    states.push(z);
    for i in 0..grid.n_steps() {
        let db = v[i + 1] - v[i];
        z = decay * z + c * half_decay * db;
        states.push(z);
    }
    Trajectory::from_states(grid, 1, states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgn::{FbmPath, HurstParameter, TimeGrid};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn h(v: f64) -> HurstParameter {
        HurstParameter::new(v).unwrap()
    }

    fn path_from_values(t_end: f64, values: Vec<f64>, hv: f64) -> FbmPath {
        let grid = TimeGrid::new(t_end, values.len() - 1).unwrap();
        FbmPath::new(grid, values, h(hv)).unwrap()
    }

    fn scalar_system(
        drift: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        diffusion: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        hv: f64,
        eps: f64,
    ) -> SdeSystem {
        SdeSystem::new(
            1,
            1,
            Arc::new(move |t, x: &[f64], out: &mut [f64]| out[0] = drift(t, x[0])),
            Arc::new(move |t, x: &[f64], out: &mut [f64]| out[0] = diffusion(t, x[0])),
            h(hv),
            eps,
        )
        .unwrap()
    }

    #[test]
    fn zero_coefficients_hold_initial_state() {
        let sys = scalar_system(|_, _| 0.0, |_, _| 0.0, 0.75, 0.1);
        let p = path_from_values(1.0, vec![0.0, 0.5, -0.3, 0.9], 0.75);
        for kind in IntegralKind::ALL {
            let tr = euler_solve(&sys, &[2.5], &[p.clone()], kind).unwrap();
            assert!(tr.scalar_values().iter().all(|&v| v == 2.5));
        }
    }

    #[test]
    fn additive_noise_reproduces_scaled_path_exactly() {
        // b = 0, sigma = 1: x(t_i) = x0 + eps^H B(t_i) for every kind.
        let eps = 0.3f64;
        let hv = 0.75;
        let sys = scalar_system(|_, _| 0.0, |_, _| 1.0, hv, eps);
        let p = path_from_values(1.0, vec![0.0, 0.5, -0.3, 0.9, 0.4], hv);
        let c = eps.powf(hv);
        for kind in IntegralKind::ALL {
            let tr = euler_solve(&sys, &[1.0], &[p.clone()], kind).unwrap();
            for (i, v) in tr.scalar_values().iter().enumerate() {
                assert_relative_eq!(*v, 1.0 + c * p.values()[i], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn constant_coefficients_identical_across_kinds_bitwise() {
        let sys = scalar_system(|_, _| -0.7, |_, _| 1.3, 0.75, 0.2);
        let p = path_from_values(1.0, vec![0.0, 0.5, -0.3, 0.9, 0.4], 0.75);
        let f = euler_solve(&sys, &[1.0], &[p.clone()], IntegralKind::Forward).unwrap();
        let b = euler_solve(&sys, &[1.0], &[p.clone()], IntegralKind::Backward).unwrap();
        let s = euler_solve(&sys, &[1.0], &[p], IntegralKind::Symmetric).unwrap();
        assert_eq!(f.states(), b.states());
        assert_eq!(f.states(), s.states());
    }

    #[test]
    fn divergence_reports_step_index() {
        // Super-linear explosive drift at a large scale blows up fast.
        let sys = scalar_system(|_, x| x * x * x * 1e6, |_, _| 0.0, 0.75, 1.0);
        let p = path_from_values(1.0, vec![0.0; 33], 0.75);
        let err = euler_solve(&sys, &[10.0], &[p], IntegralKind::Forward).unwrap_err();
        match err {
            Error::Divergence { step } => assert!(step >= 1),
            other => panic!("expected divergence, got {other}"),
        }
    }

    #[test]
    fn dimension_checks() {
        let sys = scalar_system(|_, _| 0.0, |_, _| 1.0, 0.75, 0.5);
        let p = path_from_values(1.0, vec![0.0, 0.1], 0.75);
        assert!(euler_solve(&sys, &[0.0, 0.0], &[p.clone()], IntegralKind::Forward).is_err());
        assert!(euler_solve(&sys, &[0.0], &[], IntegralKind::Forward).is_err());
        // Path Hurst mismatch.
        let p55 = path_from_values(1.0, vec![0.0, 0.1], 0.55);
        assert!(euler_solve(&sys, &[0.0], &[p55], IntegralKind::Forward).is_err());
    }

    #[test]
    fn ou_exact_with_zero_rate_is_shifted_path() {
        let p = path_from_values(1.0, vec![0.0, 0.5, -0.3, 0.9], 0.75);
        let tr = ou_exact_solution(0.0, 0.3, h(0.75), 1.5, &p);
        let c = 0.3f64.powf(0.75);
        for (i, v) in tr.scalar_values().iter().enumerate() {
            assert_relative_eq!(*v, 1.5 + c * p.values()[i], epsilon = 1e-13);
        }
    }

    #[test]
    fn ou_exact_zero_input_is_zero() {
        let p = path_from_values(1.0, vec![0.0; 9], 0.75);
        let tr = ou_exact_solution(0.8, 0.3, h(0.75), 0.0, &p);
        assert!(tr.scalar_values().iter().all(|&v| v == 0.0));
    }
}
