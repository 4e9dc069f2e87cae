//! Reproducible noise streams.
//!
//! All randomness flows through a single 64-bit master seed. Independent
//! work items (replicates, paths) get their own ChaCha stream selected by a
//! counter, so adding replicates never perturbs the noise of earlier ones
//! and parallel execution cannot change what any item sees.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// RNG for work item `stream` under `master_seed`.
pub fn substream(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Draw `n` iid standard normal variates.
pub fn standard_normal_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}
