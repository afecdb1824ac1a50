//! Deterministic random streams.
//!
//! Every run owns a handful of independent ChaCha8 streams derived from
//! `(base_seed, replication)`. Keeping the epidemic, cure, optimizer and
//! evaluation draws on separate streams means toggling the optimizer never
//! shifts the society-initialisation draws, and a child's fitness
//! evaluation depends only on its `(batch, index)` coordinates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// SplitMix64 finaliser. Stable across platforms and releases.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `replication` under `base_seed`.
pub fn replication_seed(base_seed: u64, replication: u64) -> u64 {
    mix64(mix64(base_seed) ^ replication.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    SocietyInit = 1,
    Epidemic = 2,
    CureApplication = 3,
    Optimizer = 4,
    Evaluation = 5,
}

pub fn stream(run_seed: u64, which: Stream) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
    rng.set_stream(which as u64);
    rng
}

/// Source of per-evaluation sub-streams.
///
/// `rng(batch, index)` is a pure function of its arguments, so evaluations
/// may run in any order or in parallel and still produce identical values.
#[derive(Debug, Clone, Copy)]
pub struct EvalStreams {
    seed: u64,
}

impl EvalStreams {
    pub fn new(run_seed: u64) -> Self {
        Self {
            seed: mix64(run_seed ^ Stream::Evaluation as u64),
        }
    }

    pub fn rng(&self, batch: u64, index: u64) -> SimRng {
        let mut rng = ChaCha8Rng::seed_from_u64(mix64(self.seed ^ batch));
        rng.set_stream(index);
        rng
    }
}

/// All streams used by a single run.
#[derive(Debug, Clone)]
pub struct RunStreams {
    pub seed: u64,
    pub society_init: SimRng,
    pub epidemic: SimRng,
    pub cure: SimRng,
    pub optimizer: SimRng,
    pub evaluation: EvalStreams,
}

impl RunStreams {
    pub fn new(run_seed: u64) -> Self {
        Self {
            seed: run_seed,
            society_init: stream(run_seed, Stream::SocietyInit),
            epidemic: stream(run_seed, Stream::Epidemic),
            cure: stream(run_seed, Stream::CureApplication),
            optimizer: stream(run_seed, Stream::Optimizer),
            evaluation: EvalStreams::new(run_seed),
        }
    }
}
