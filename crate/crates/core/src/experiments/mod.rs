//! Paired Monte Carlo comparison of a time-dependent system with its
//! averaged counterpart.
//!
//! Both solutions are driven by the identical noise paths per replicate
//! (synchronous coupling), which compares them pathwise and keeps the error
//! statistics low-variance. Replicate noise comes from counter-indexed
//! streams of one master seed and the statistics are combined in ascending
//! replicate order after parallel computation, so results are bit-stable
//! across thread counts.

mod presets;

pub use presets::{example1_preset, example2_preset, PresetCase};

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::averaging::{build_averaged_system, AveragedSystem, DiffusionAveraging, Provenance};
use crate::error::{Error, Result};
use crate::fgn::{CirculantGenerator, FbmPath, HurstParameter, TimeGrid};
use crate::integrator::{euler_solve, AutonomousFn, CoefficientFn, IntegralKind, SdeSystem, Trajectory};
use crate::rng::{standard_normal_vec, substream};
use crate::stats;

/// Fraction of divergent replicates beyond which a run is an error.
const DIVERGENCE_LIMIT: f64 = 0.01;
/// Normal quantile for the 95% confidence intervals.
const Z_95: f64 = 1.959963984540054;
/// Replicates processed per parallel batch; batches are folded in order.
const REPLICATE_CHUNK: usize = 128;

/// Produces averaged coefficients for a given diffusion convention.
pub type AveragedFactory = dyn Fn(DiffusionAveraging) -> Result<(Arc<AutonomousFn>, Arc<AutonomousFn>, Provenance)>
    + Send
    + Sync;

/// Coefficient closures defining the system under study.
#[derive(Clone)]
pub struct SystemSpec {
    pub name: String,
    pub dim_state: usize,
    pub dim_noise: usize,
    pub drift: Arc<CoefficientFn>,
    pub diffusion: Arc<CoefficientFn>,
    /// Structured averaged coefficients, when the system's form admits them
    /// cheaply. `None` falls back to generic window quadrature with per-state
    /// memoization.
    pub averaged: Option<Arc<AveragedFactory>>,
}

impl std::fmt::Debug for SystemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SystemSpec")
            .field("name", &self.name)
            .field("dim_state", &self.dim_state)
            .field("dim_noise", &self.dim_noise)
            .field("averaged", &self.averaged.is_some())
            .finish()
    }
}

/// Full description of a paired experiment.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub system: SystemSpec,
    pub hurst: HurstParameter,
    /// Averaging window `T1` for constructing the averaged coefficients.
    pub window: f64,
    pub kind: IntegralKind,
    pub x0: Vec<f64>,
    pub grid: TimeGrid,
    /// Scale parameters for the sweep, sorted descending.
    pub epsilons: Vec<f64>,
    /// The epsilon whose detailed outputs (error curve, sample trajectories)
    /// are of primary interest; must be a member of `epsilons`.
    pub headline_epsilon: f64,
    /// Replicates per epsilon.
    pub replicates: usize,
    pub master_seed: u64,
    /// Exceedance threshold for the in-probability statistic.
    pub delta_prob: f64,
    pub diffusion_mode: DiffusionAveraging,
    pub epsilon_0: f64,
    /// Number of leading replicates whose trajectory pairs are retained.
    pub keep_trajectories: usize,
    /// Reference coefficient values recorded for report output (stated
    /// values alongside computed ones); purely informational.
    pub reference_values: BTreeMap<String, f64>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() {
            return Err(Error::InvalidConfig("epsilons must be nonempty".into()));
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidConfig(
                "epsilons must be sorted strictly descending".into(),
            ));
        }
        for &eps in &self.epsilons {
            if !(eps > 0.0 && eps <= self.epsilon_0) {
                return Err(Error::InvalidEpsilon {
                    epsilon: eps,
                    epsilon_0: self.epsilon_0,
                });
            }
        }
        if !self.epsilons.contains(&self.headline_epsilon) {
            return Err(Error::InvalidConfig(format!(
                "headline epsilon {} is not in the sweep list",
                self.headline_epsilon
            )));
        }
        if self.replicates < 2 {
            return Err(Error::InvalidConfig("need at least 2 replicates".into()));
        }
        if !(self.delta_prob > 0.0) {
            return Err(Error::InvalidConfig(
                "exceedance threshold must be positive".into(),
            ));
        }
        if !(self.window > 0.0) {
            return Err(Error::InvalidConfig(
                "averaging window must be positive".into(),
            ));
        }
        if self.x0.len() != self.system.dim_state {
            return Err(Error::DimensionMismatch(format!(
                "x0 has length {} for state dimension {}",
                self.x0.len(),
                self.system.dim_state
            )));
        }
        self.hurst.require_long_memory("paired averaging experiments")?;
        Ok(())
    }

    /// Assemble the solvable original system at a given epsilon.
    pub fn build_system(&self, epsilon: f64) -> Result<SdeSystem> {
        SdeSystem::new(
            self.system.dim_state,
            self.system.dim_noise,
            Arc::clone(&self.system.drift),
            Arc::clone(&self.system.diffusion),
            self.hurst,
            epsilon,
        )?
        .with_epsilon_0(self.epsilon_0)
    }

    /// Assemble the averaged pair at a given epsilon.
    pub fn build_averaged(&self, epsilon: f64) -> Result<AveragedSystem> {
        let base = self.build_system(epsilon)?;
        match &self.system.averaged {
            Some(factory) => {
                let (b_bar, sigma_bar, provenance) = factory(self.diffusion_mode)?;
                Ok(AveragedSystem::from_closures(
                    base,
                    b_bar,
                    sigma_bar,
                    self.window,
                    provenance,
                ))
            }
            None => build_averaged_system(&base, self.window, self.diffusion_mode),
        }
    }
}

/// Error statistics of one paired ensemble at a fixed epsilon.
#[derive(Debug, Clone)]
pub struct PairedEnsemble {
    pub epsilon: f64,
    pub grid: TimeGrid,
    pub delta_prob: f64,
    /// Per-node mean of `|X - Z|^2` over replicates.
    pub mse_curve: Vec<f64>,
    pub mse_ci_lo: Vec<f64>,
    pub mse_ci_hi: Vec<f64>,
    /// Maximum of `mse_curve` and the CI at the attaining node.
    pub sup_mse: f64,
    pub sup_mse_ci: (f64, f64),
    pub sup_mse_node: usize,
    /// Fraction of replicates with `max_t |X - Z| > delta_prob`, with a
    /// Wilson 95% interval.
    pub exceedance: f64,
    pub exceedance_ci: (f64, f64),
    pub replicates_used: usize,
    pub divergent: usize,
    /// Leading replicate trajectory pairs `(X, Z)` kept for plotting.
    pub sample_pairs: Vec<(Trajectory, Trajectory)>,
}

struct ReplicateOutcome {
    sq_curve: Vec<f64>,
    max_abs: f64,
    pair: Option<(Trajectory, Trajectory)>,
    diverged: bool,
}

fn run_replicate(
    replicate: usize,
    config: &ExperimentConfig,
    system: &SdeSystem,
    averaged_system: &SdeSystem,
    generator: &CirculantGenerator,
    keep: bool,
) -> Result<ReplicateOutcome> {
    let mut rng = substream(config.master_seed, replicate as u64);
    let m = config.system.dim_noise;
    let mut paths: Vec<FbmPath> = Vec::with_capacity(m);
    for _ in 0..m {
        let noise = standard_normal_vec(&mut rng, generator.noise_len());
        paths.push(generator.generate(&noise)?);
    }

    let x = euler_solve(system, &config.x0, &paths, config.kind);
    let z = euler_solve(averaged_system, &config.x0, &paths, config.kind);
    let (x, z) = match (x, z) {
        (Ok(x), Ok(z)) => (x, z),
        (Err(Error::Divergence { .. }), _) | (_, Err(Error::Divergence { .. })) => {
            return Ok(ReplicateOutcome {
                sq_curve: Vec::new(),
                max_abs: f64::NAN,
                pair: None,
                diverged: true,
            });
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };

    let d = config.system.dim_state;
    let n_nodes = config.grid.n_nodes();
    let mut sq_curve = Vec::with_capacity(n_nodes);
    let mut max_sq: f64 = 0.0;
    for i in 0..n_nodes {
        let (xs, zs) = (x.state(i), z.state(i));
        let mut acc = 0.0;
        for r in 0..d {
            let diff = xs[r] - zs[r];
            acc += diff * diff;
        }
        sq_curve.push(acc);
        max_sq = max_sq.max(acc);
    }
    Ok(ReplicateOutcome {
        sq_curve,
        max_abs: max_sq.sqrt(),
        pair: keep.then_some((x, z)),
        diverged: false,
    })
}

/// Run the paired ensemble at one epsilon.
pub fn run_paired(config: &ExperimentConfig, epsilon: f64) -> Result<PairedEnsemble> {
    config.validate()?;
    let system = config.build_system(epsilon)?;
    let averaged = config.build_averaged(epsilon)?;
    let averaged_system = averaged.to_system();

    // Regularity spot check around the initial state (finiteness only; the
    // Lipschitz estimates are advisory).
    let state_box: Vec<(f64, f64)> = config.x0.iter().map(|&c| (c - 2.0, c + 2.0)).collect();
    system.spot_check(&state_box, config.grid.t_end().min(config.window), 32)?;

    let generator = CirculantGenerator::new(config.grid.clone(), config.hurst)?;

    let n_nodes = config.grid.n_nodes();
    let m_total = config.replicates;
    let mut mean = vec![0.0; n_nodes];
    let mut m2 = vec![0.0; n_nodes];
    let mut used = 0usize;
    let mut divergent = 0usize;
    let mut exceed = 0usize;
    let mut sample_pairs = Vec::new();

    let mut start = 0;
    while start < m_total {
        let end = (start + REPLICATE_CHUNK).min(m_total);
        let chunk: Vec<Result<ReplicateOutcome>> = (start..end)
            .into_par_iter()
            .map(|r| {
                run_replicate(
                    r,
                    config,
                    &system,
                    &averaged_system,
                    &generator,
                    r < config.keep_trajectories,
                )
            })
            .collect();
        for outcome in chunk {
            let outcome = outcome?;
            if outcome.diverged {
                divergent += 1;
                continue;
            }
            used += 1;
            let count = used as f64;
            for (i, &sq) in outcome.sq_curve.iter().enumerate() {
                let delta = sq - mean[i];
                mean[i] += delta / count;
                m2[i] += delta * (sq - mean[i]);
            }
            if outcome.max_abs > config.delta_prob {
                exceed += 1;
            }
            if let Some(pair) = outcome.pair {
                sample_pairs.push(pair);
            }
        }
        start = end;
    }

    if (divergent as f64) > DIVERGENCE_LIMIT * m_total as f64 {
        return Err(Error::TooManyDivergent {
            divergent,
            total: m_total,
        });
    }
    if used == 0 {
        return Err(Error::EmptyEnsemble);
    }

    let mut mse_ci_lo = Vec::with_capacity(n_nodes);
    let mut mse_ci_hi = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        let var = if used > 1 { m2[i] / (used - 1) as f64 } else { 0.0 };
        let half = Z_95 * (var / used as f64).sqrt();
        mse_ci_lo.push((mean[i] - half).max(0.0));
        mse_ci_hi.push(mean[i] + half);
    }
    let (sup_mse_node, sup_mse) = mean
        .iter()
        .enumerate()
        .fold((0usize, 0.0f64), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
    let exceedance = exceed as f64 / used as f64;
    let exceedance_ci = stats::wilson_interval(exceed, used, Z_95);

    Ok(PairedEnsemble {
        epsilon,
        grid: config.grid.clone(),
        delta_prob: config.delta_prob,
        sup_mse,
        sup_mse_ci: (mse_ci_lo[sup_mse_node], mse_ci_hi[sup_mse_node]),
        sup_mse_node,
        mse_curve: mean,
        mse_ci_lo,
        mse_ci_hi,
        exceedance,
        exceedance_ci,
        replicates_used: used,
        divergent,
        sample_pairs,
    })
}

/// One row of the epsilon sweep table.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub epsilon: f64,
    pub sup_mse: f64,
    pub sup_mse_ci: (f64, f64),
    pub exceedance: f64,
    pub exceedance_ci: (f64, f64),
    pub divergent: usize,
}

/// Sweep output: per-epsilon ensembles plus monotonicity diagnostics.
#[derive(Debug)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub ensembles: Vec<PairedEnsemble>,
    /// Present only for sweeps over at least two epsilons.
    pub sup_mse_non_increasing: Option<bool>,
    pub exceedance_non_increasing: Option<bool>,
}

/// Run the paired ensemble for every configured epsilon (descending), with
/// the master seed shared so all epsilons see identical noise.
pub fn epsilon_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let mut ensembles = Vec::with_capacity(config.epsilons.len());
    for &eps in &config.epsilons {
        ensembles.push(run_paired(config, eps)?);
    }
    let rows: Vec<SweepRow> = ensembles
        .iter()
        .map(|e| SweepRow {
            epsilon: e.epsilon,
            sup_mse: e.sup_mse,
            sup_mse_ci: e.sup_mse_ci,
            exceedance: e.exceedance,
            exceedance_ci: e.exceedance_ci,
            divergent: e.divergent,
        })
        .collect();
    // Epsilons are descending, so the statistics should not increase along
    // the rows if the averaging error really shrinks with epsilon.
    let (sup_mono, exc_mono) = if rows.len() >= 2 {
        (
            Some(rows.windows(2).all(|w| w[1].sup_mse <= w[0].sup_mse)),
            Some(rows.windows(2).all(|w| w[1].exceedance <= w[0].exceedance)),
        )
    } else {
        (None, None)
    };
    Ok(SweepResult {
        rows,
        ensembles,
        sup_mse_non_increasing: sup_mono,
        exceedance_non_increasing: exc_mono,
    })
}

/// A minimal autonomous spec whose averaged pair is the system itself,
/// coefficient closures shared bitwise. Used by coupling null tests.
pub fn autonomous_null_spec(
    name: &str,
    drift: Arc<CoefficientFn>,
    diffusion: Arc<CoefficientFn>,
) -> SystemSpec {
    let b = Arc::clone(&drift);
    let s = Arc::clone(&diffusion);
    let factory: Arc<AveragedFactory> = Arc::new(move |_mode| {
        let b = Arc::clone(&b);
        let s = Arc::clone(&s);
        Ok((
            Arc::new(move |x: &[f64], out: &mut [f64]| b(0.0, x, out)) as Arc<AutonomousFn>,
            Arc::new(move |x: &[f64], out: &mut [f64]| s(0.0, x, out)) as Arc<AutonomousFn>,
            Provenance::Analytic,
        ))
    });
    SystemSpec {
        name: name.to_string(),
        dim_state: 1,
        dim_noise: 1,
        drift,
        diffusion,
        averaged: Some(factory),
    }
}
