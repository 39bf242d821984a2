//! Random stream layout.
//!
//! Every random draw in the crate comes from ChaCha8. A scenario seed `s`
//! expands into per-trial streams: trial `i` uses
//! `ChaCha8Rng::seed_from_u64(s)` with its stream id set to `i`. ChaCha
//! streams are independent 2^64-block sequences, so trials can run in any
//! order on any number of threads and still see the same numbers.
//!
//! Secondary seeds (the H0 half of a sweep, calibration runs) come from
//! [`derive_seed`], a SplitMix64 finaliser over the parent seed and a label.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream generator used for every trial.
pub type TrialRng = ChaCha8Rng;

/// Returns the random stream owned by trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Mixes `label` into `seed` to get an unrelated child seed.
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    let mut z = seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Labels for [`derive_seed`].
pub mod labels {
    pub const NOISE_ONLY: u64 = 0x4830;
    pub const CALIBRATION: u64 = 0xCA1B;
}
