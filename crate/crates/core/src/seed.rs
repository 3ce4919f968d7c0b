//! Deterministic derivation of independent RNG streams.
//!
//! A stream seed is obtained by chaining the SplitMix64 finalizer over
//! `(base_seed, run, policy, tag)`:
//!
//! ```text
//! mix(x) = splitmix64 finalizer of x + 0x9E3779B97F4A7C15
//! seed   = mix(mix(mix(mix(base_seed) ^ run) ^ policy) ^ tag)
//! ```
//!
//! The seed is expanded into a ChaCha8 generator through
//! `SeedableRng::seed_from_u64`, which is portable across platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream used to generate the bandit task of a run. Shared by all policies.
pub const TASK_STREAM: u64 = 0x7461_736b; // "task"
/// Stream used for action draws and rewards of one policy in one run.
pub const PLAY_STREAM: u64 = 0x706c_6179; // "play"

/// One SplitMix64 step.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream_seed(base_seed: u64, run: u64, policy: u64, tag: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(splitmix64(base_seed) ^ run) ^ policy) ^ tag)
}

pub fn stream_rng(base_seed: u64, run: u64, policy: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(base_seed, run, policy, tag))
}

/// Generator for the task of run `run`.
pub fn task_rng(base_seed: u64, run: u64) -> ChaCha8Rng {
    stream_rng(base_seed, run, 0, TASK_STREAM)
}

/// Generator for the plays of policy `policy` in run `run`.
pub fn play_rng(base_seed: u64, run: u64, policy: u64) -> ChaCha8Rng {
    stream_rng(base_seed, run, policy, PLAY_STREAM)
}
