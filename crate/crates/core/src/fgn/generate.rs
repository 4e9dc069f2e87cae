//! Exact path generators.
//!
//! Both generators sample unit-lag fractional Gaussian noise with covariance
//! `rho(k)`, scale it by `dt^H` (self-similarity makes this exact) and
//! cumulatively sum into the path. The Cholesky route factors the Toeplitz
//! increment covariance directly; the circulant route embeds it in a
//! circulant matrix of size `2 n` whose eigenvalues come from one FFT.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::fgn::{fgn_autocovariance, FbmPath, HurstParameter, TimeGrid};

/// Relative clipping tolerance for circulant eigenvalues. Raw eigenvalues in
/// `[-tol, 0)` are clipped to zero; anything below `-tol` is a hard failure
/// because the fGn embedding is expected nonnegative for `H` in `[1/2, 1)`.
const EIGENVALUE_CLIP_REL_TOL: f64 = 1e-12;

/// Eigenvalues of the circulant embedding after clipping, plus how many raw
/// values needed the clip.
#[derive(Debug, Clone)]
pub struct FgnSpectrum {
    eigenvalues: Vec<f64>,
    clipped_count: usize,
}

impl FgnSpectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn clipped_count(&self) -> usize {
        self.clipped_count
    }
}

fn cumsum_into_path(grid: TimeGrid, h: HurstParameter, fgn: &[f64]) -> FbmPath {
    let scale = grid.dt().powf(h.value());
    let mut values = Vec::with_capacity(grid.n_nodes());
    values.push(0.0);
    let mut acc = 0.0;
    for &g in fgn {
        acc += scale * g;
        values.push(acc);
    }
    FbmPath::new(grid, values, h).expect("generator output obeys path invariants")
}

/// Exact generator backed by a Cholesky factor of the increment covariance.
///
/// Factoring costs `O(n^3)` once; each path is an `O(n^2)` triangular
/// product, so this is the reference generator for small grids.
pub struct CholeskyGenerator {
    grid: TimeGrid,
    h: HurstParameter,
    // Lower-triangular factor, row-major n x n.
    factor: Vec<f64>,
}

impl CholeskyGenerator {
    pub fn new(grid: TimeGrid, h: HurstParameter) -> Result<Self> {
        let n = grid.n_steps();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                a[i * n + j] = fgn_autocovariance((i - j) as u64, h);
            }
        }
        cholesky_lower_in_place(&mut a, n)?;
        Ok(Self { grid, h, factor: a })
    }

    /// Required noise length: one standard normal per increment.
    pub fn noise_len(&self) -> usize {
        self.grid.n_steps()
    }

    pub fn generate(&self, noise: &[f64]) -> Result<FbmPath> {
        let n = self.grid.n_steps();
        if noise.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: noise.len(),
            });
        }
        let mut fgn = vec![0.0; n];
        for i in 0..n {
            let row = &self.factor[i * n..i * n + i + 1];
            let mut acc = 0.0;
            for (l, z) in row.iter().zip(noise) {
                acc += l * z;
            }
            fgn[i] = acc;
        }
        Ok(cumsum_into_path(self.grid.clone(), self.h, &fgn))
    }
}

/// In-place lower Cholesky factorization, reporting the failing pivot.
fn cholesky_lower_in_place(a: &mut [f64], n: usize) -> Result<()> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::FactorizationFailed { pivot: j });
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
        for k in (j + 1)..n {
            a[j * n + k] = 0.0;
        }
    }
    Ok(())
}

/// Exact `O(n log n)` generator via circulant embedding of the increment
/// covariance (embedding size `2 n`).
pub struct CirculantGenerator {
    grid: TimeGrid,
    h: HurstParameter,
    spectrum: FgnSpectrum,
    // Amplitude per Fourier mode, premultiplied so the synthesized noise has
    // exactly the target covariance: sqrt(lambda_k / m) on the two real
    // modes, sqrt(lambda_k / (2 m)) on the paired complex modes.
    amplitude: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl CirculantGenerator {
    pub fn new(grid: TimeGrid, h: HurstParameter) -> Result<Self> {
        let n = grid.n_steps();
        let m = 2 * n;
        let mut buf: Vec<Complex64> = (0..m)
            .map(|k| {
                let lag = k.min(m - k) as u64;
                Complex64::new(fgn_autocovariance(lag, h), 0.0)
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut buf);

        let raw: Vec<f64> = buf.iter().map(|c| c.re).collect();
        let max_eig = raw.iter().cloned().fold(0.0, f64::max);
        let tol = EIGENVALUE_CLIP_REL_TOL * max_eig;
        let mut eigenvalues = Vec::with_capacity(m);
        let mut clipped_count = 0;
        for (k, &lambda) in raw.iter().enumerate() {
            if lambda < -tol {
                return Err(Error::EmbeddingFailed {
                    index: k,
                    value: lambda,
                    tolerance: tol,
                });
            }
            if lambda < 0.0 {
                clipped_count += 1;
                eigenvalues.push(0.0);
            } else {
                eigenvalues.push(lambda);
            }
        }

        let mf = m as f64;
        let amplitude: Vec<f64> = eigenvalues
            .iter()
            .enumerate()
            .map(|(k, &lambda)| {
                if k == 0 || k == n {
                    (lambda / mf).sqrt()
                } else {
                    (lambda / (2.0 * mf)).sqrt()
                }
            })
            .collect();

        Ok(Self {
            grid,
            h,
            spectrum: FgnSpectrum {
                eigenvalues,
                clipped_count,
            },
            amplitude,
            fft,
        })
    }

    pub fn spectrum(&self) -> &FgnSpectrum {
        &self.spectrum
    }

    /// Required noise length: the embedding size `2 * n_steps`.
    pub fn noise_len(&self) -> usize {
        2 * self.grid.n_steps()
    }

    pub fn generate(&self, noise: &[f64]) -> Result<FbmPath> {
        let n = self.grid.n_steps();
        let m = 2 * n;
        if noise.len() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                got: noise.len(),
            });
        }
        let mut w = vec![Complex64::new(0.0, 0.0); m];
        w[0] = Complex64::new(self.amplitude[0] * noise[0], 0.0);
        w[n] = Complex64::new(self.amplitude[n] * noise[m - 1], 0.0);
        for k in 1..n {
            let z = Complex64::new(noise[2 * k - 1], noise[2 * k]);
            w[k] = self.amplitude[k] * z;
            w[m - k] = w[k].conj();
        }
        self.fft.process(&mut w);
        let fgn: Vec<f64> = w[..n].iter().map(|c| c.re).collect();
        Ok(cumsum_into_path(self.grid.clone(), self.h, &fgn))
    }
}

/// One-shot Cholesky generation; for ensembles build a [`CholeskyGenerator`]
/// once and reuse the factor.
pub fn generate_cholesky(grid: &TimeGrid, h: HurstParameter, noise: &[f64]) -> Result<FbmPath> {
    CholeskyGenerator::new(grid.clone(), h)?.generate(noise)
}

/// One-shot circulant generation; for ensembles build a
/// [`CirculantGenerator`] once and reuse the spectrum.
pub fn generate_circulant(grid: &TimeGrid, h: HurstParameter, noise: &[f64]) -> Result<FbmPath> {
    CirculantGenerator::new(grid.clone(), h)?.generate(noise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn h(v: f64) -> HurstParameter {
        HurstParameter::new(v).unwrap()
    }

    #[test]
    fn zero_noise_gives_zero_path_both_generators() {
        let grid = TimeGrid::new(1.0, 8).unwrap();
        let p = generate_cholesky(&grid, h(0.75), &vec![0.0; 8]).unwrap();
        assert!(p.values().iter().all(|&v| v == 0.0));
        let p = generate_circulant(&grid, h(0.75), &vec![0.0; 16]).unwrap();
        assert!(p.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cholesky_brownian_case_is_scaled_random_walk() {
        let grid = TimeGrid::new(2.0, 16).unwrap();
        let noise: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).sin()).collect();
        let p = generate_cholesky(&grid, h(0.5), &noise).unwrap();
        // Increment covariance is diagonal at H = 1/2, so increments must be
        // sqrt(dt) * noise, i.e. the direct Brownian construction.
        let sqrt_dt = grid.dt().sqrt();
        for (inc, z) in p.increments().iter().zip(&noise) {
            assert_relative_eq!(*inc, sqrt_dt * z, epsilon = 1e-14);
        }
    }

    #[test]
    fn cholesky_matches_hand_factorization_3x3() {
        // Independent oracle: factor the 3x3 unit-lag increment covariance by
        // hand for H = 0.75, dt = 1 and push noise e1 through it.
        let hv = h(0.75);
        let g1 = fgn_autocovariance(1, hv);
        let g2 = fgn_autocovariance(2, hv);
        let l00 = 1.0f64;
        let l10 = g1 / l00;
        let l20 = g2 / l00;
        let expected = [0.0, l00, l00 + l10, l00 + l10 + l20];

        let grid = TimeGrid::new(3.0, 3).unwrap();
        let p = generate_cholesky(&grid, hv, &[1.0, 0.0, 0.0]).unwrap();
        for (a, b) in p.values().iter().zip(&expected) {
            assert_relative_eq!(a, b, epsilon = 1e-14);
        }
        // Reference decimals for the same quantities (30-digit evaluation).
        assert_relative_eq!(p.values()[2], 1.4142135623730951, epsilon = 1e-14);
        assert_relative_eq!(p.values()[3], 1.6838626489802209, epsilon = 1e-14);
    }

    #[test]
    fn generators_are_deterministic() {
        let grid = TimeGrid::new(1.0, 32).unwrap();
        let noise: Vec<f64> = (0..64).map(|i| ((i * 37 % 11) as f64 - 5.0) / 3.0).collect();
        let a = generate_circulant(&grid, h(0.8), &noise).unwrap();
        let b = generate_circulant(&grid, h(0.8), &noise).unwrap();
        assert_eq!(a.values(), b.values());
        let a = generate_cholesky(&grid, h(0.8), &noise[..32]).unwrap();
        let b = generate_cholesky(&grid, h(0.8), &noise[..32]).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn noise_length_is_checked() {
        let grid = TimeGrid::new(1.0, 8).unwrap();
        assert!(matches!(
            generate_cholesky(&grid, h(0.7), &[0.0; 7]),
            Err(Error::LengthMismatch { expected: 8, got: 7 })
        ));
        assert!(matches!(
            generate_circulant(&grid, h(0.7), &[0.0; 8]),
            Err(Error::LengthMismatch { expected: 16, got: 8 })
        ));
    }

    #[test]
    fn spectrum_is_nonnegative_across_hurst_range() {
        for hv in [0.5, 0.55, 0.75, 0.9, 0.99] {
            let gen = CirculantGenerator::new(TimeGrid::new(1.0, 64).unwrap(), h(hv)).unwrap();
            assert!(gen.spectrum().eigenvalues().iter().all(|&l| l >= 0.0));
            // Expected nonnegative for this embedding; clips are fp dust.
            assert!(gen.spectrum().clipped_count() <= 2, "H = {hv}");
        }
    }

    #[test]
    fn cholesky_rejects_duplicated_nodes() {
        // A singular covariance (duplicated rows) must fail with the pivot.
        let mut a = vec![1.0, 1.0, 1.0, 1.0];
        let err = cholesky_lower_in_place(&mut a, 2).unwrap_err();
        assert!(matches!(err, Error::FactorizationFailed { pivot: 1 }));
    }
}
