//! Riemann-sum analogues of the three pathwise integrals and the exact
//! second moment of integrals with deterministic integrands.

use crate::error::{Error, Result};
use crate::fgn::{FbmPath, HurstParameter, TimeGrid};
use crate::integrator::IntegralKind;

/// Integrate a node-sampled integrand `u` against a path.
///
/// With `dB_i = B(t_{i+1}) - B(t_i)`:
/// forward sums `u(t_i) dB_i`, backward `u(t_{i+1}) dB_i`, symmetric the
/// trapezoidal mean. These are the Riemann-sum analogues of the endpoint
/// difference-quotient definitions of the three integrals.
pub fn pathwise_integral(u: &[f64], path: &FbmPath, kind: IntegralKind) -> Result<f64> {
    let n_nodes = path.grid().n_nodes();
    if u.len() != n_nodes {
        return Err(Error::LengthMismatch {
            expected: n_nodes,
            got: u.len(),
        });
    }
    let v = path.values();
    let mut acc = 0.0;
    for i in 0..n_nodes - 1 {
        let db = v[i + 1] - v[i];
        let w = match kind {
            IntegralKind::Forward => u[i],
            IntegralKind::Backward => u[i + 1],
            IntegralKind::Symmetric => 0.5 * (u[i] + u[i + 1]),
        };
        acc += w * db;
    }
    Ok(acc)
}

/// Exact second moment `E[(int f dB)^2]` for a deterministic integrand.
///
/// Evaluates the double integral of `f(t) f(s)` against the long-memory
/// kernel `H(2H-1)|t-s|^{2H-2}` by sampling `f` at cell midpoints and
/// integrating the kernel over each cell pair in closed form: with
/// `G(u) = |u|^{2H} / 2` the cell weight is
/// `G(b-c) - G(a-c) - G(b-d) + G(a-d)`, which is precisely the covariance
/// of the corresponding path increments. The singularity on the diagonal is
/// therefore handled exactly, and `f = 1` returns `t_end^{2H}` to machine
/// accuracy on any grid.
pub fn second_moment_deterministic(
    f: impl Fn(f64) -> f64,
    grid: &TimeGrid,
    h: HurstParameter,
) -> Result<f64> {
    h.require_long_memory("second_moment_deterministic")?;
    let n = grid.n_steps();
    let dt = grid.dt();
    let two_h = 2.0 * h.value();
    let g = |u: f64| 0.5 * u.abs().powf(two_h);

    let fv: Vec<f64> = (0..n).map(|i| f((i as f64 + 0.5) * dt)).collect();
    let mut acc = 0.0;
    // Weights depend only on |i - j|; diagonal first, then both off-diagonal
    // triangles via symmetry.
    let w_diag = 2.0 * g(dt);
    for i in 0..n {
        acc += fv[i] * fv[i] * w_diag;
    }
    for lag in 1..n {
        let u = lag as f64 * dt;
        let w = g(u + dt) - 2.0 * g(u) + g(u - dt);
        let mut cross = 0.0;
        for i in 0..n - lag {
            cross += fv[i] * fv[i + lag];
        }
        acc += 2.0 * w * cross;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgn::HurstParameter;
    use approx::assert_relative_eq;

    fn h(v: f64) -> HurstParameter {
        HurstParameter::new(v).unwrap()
    }

    fn path_from_values(t_end: f64, values: Vec<f64>, hv: f64) -> FbmPath {
        let grid = TimeGrid::new(t_end, values.len() - 1).unwrap();
        FbmPath::new(grid, values, h(hv)).unwrap()
    }

    #[test]
    fn unit_integrand_telescopes_to_endpoint() {
        let p = path_from_values(1.0, vec![0.0, 0.3, -0.1, 0.7], 0.75);
        for kind in IntegralKind::ALL {
            let v = pathwise_integral(&[1.0; 4], &p, kind).unwrap();
            assert_relative_eq!(v, 0.7, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_integrand_gives_zero() {
        let p = path_from_values(1.0, vec![0.0, 0.3, -0.1, 0.7], 0.75);
        for kind in IntegralKind::ALL {
            assert_eq!(pathwise_integral(&[0.0; 4], &p, kind).unwrap(), 0.0);
        }
    }

    #[test]
    fn linear_integrand_two_step_hand_sums() {
        // u(t) = t on [0, 1] with two steps; dB = (b1, b2).
        let (b1, b2) = (0.4, -0.2);
        let p = path_from_values(1.0, vec![0.0, b1, b1 + b2], 0.75);
        let u = [0.0, 0.5, 1.0];
        assert_relative_eq!(
            pathwise_integral(&u, &p, IntegralKind::Forward).unwrap(),
            0.5 * b2,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            pathwise_integral(&u, &p, IntegralKind::Backward).unwrap(),
            0.5 * b1 + 1.0 * b2,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            pathwise_integral(&u, &p, IntegralKind::Symmetric).unwrap(),
            0.25 * b1 + 0.75 * b2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn integrand_length_is_checked() {
        let p = path_from_values(1.0, vec![0.0, 0.3, -0.1, 0.7], 0.75);
        assert!(pathwise_integral(&[1.0; 3], &p, IntegralKind::Forward).is_err());
    }

    #[test]
    fn second_moment_of_unit_integrand_is_variance() {
        // The kernel double integral over [0,T]^2 is T^{2H} in closed form.
        for (t_end, n, hv) in [(1.0, 64, 0.75), (2.5, 33, 0.6), (1.0, 128, 0.9)] {
            let grid = TimeGrid::new(t_end, n).unwrap();
            let v = second_moment_deterministic(|_| 1.0, &grid, h(hv)).unwrap();
            assert_relative_eq!(v, t_end.powf(2.0 * hv), epsilon = 1e-12);
        }
    }

    #[test]
    fn second_moment_of_zero_is_zero() {
        let grid = TimeGrid::new(1.0, 32).unwrap();
        assert_eq!(
            second_moment_deterministic(|_| 0.0, &grid, h(0.75)).unwrap(),
            0.0
        );
    }

    #[test]
    fn second_moment_rejects_classical_hurst() {
        let grid = TimeGrid::new(1.0, 32).unwrap();
        assert!(second_moment_deterministic(|_| 1.0, &grid, h(0.5)).is_err());
    }
}
