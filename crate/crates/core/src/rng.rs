//! Counter-based random streams.
//!
//! Every Monte Carlo unit of work (a repetition-code trial, an estimation
//! record, a pulse draw) gets its own generator keyed by `(seed, index)`:
//! a ChaCha8 generator whose key is expanded from `seed` by
//! [`SeedableRng::seed_from_u64`] and whose 64-bit stream id is `index`.
//! Streams with different indices never overlap, and a unit's draws do not
//! depend on which worker evaluates it or in what order.
//!
//! Independent experiments that share a user seed are separated by a
//! [`Domain`] tag mixed into the key with SplitMix64.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Separates the random streams of different harnesses driven by one seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    RepetitionTrial = 1,
    EstimationRecord = 2,
    PulseEnsemble = 3,
    Sampling = 4,
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for work unit `index` of the harness `domain` under `seed`.
pub fn stream(seed: u64, domain: Domain, index: u64) -> StreamRng {
    let key = mix64(seed ^ mix64(domain as u64));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}
