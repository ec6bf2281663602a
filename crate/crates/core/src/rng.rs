//! Deterministic RNG stream derivation.
//!
//! Every stochastic step draws from a ChaCha stream addressed by
//! `(master seed, purpose, simulation index)`. Simulation k therefore sees
//! the same split no matter which algorithms run beside it, which is what
//! makes paired designs replayable across algorithms and variable subsets.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// What a derived stream feeds. Keeps consumers out of each other's draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Split = 0,
    Forest = 1,
    Svm = 2,
    Boost = 3,
}

/// Derive the stream for one purpose inside one simulation.
pub fn stream(master_seed: u64, purpose: Purpose, sim_index: u64) -> Rng {
    debug_assert!(sim_index < 1 << 48);
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((purpose as u64) << 48) | sim_index);
    rng
}
