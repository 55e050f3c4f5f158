//! Counter-based seeding.
//!
//! Every independent job (trajectory, bundle, estimator sample block) owns a
//! stream whose seed is a hash of `(master, domain, index)`. Results therefore
//! do not depend on how jobs are scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of stream `index` in `domain` under `master`.
pub fn stream_seed(master: u64, domain: u64, index: u64) -> u64 {
    let a = mix64(master.wrapping_add(GOLDEN));
    let b = mix64(a ^ domain.wrapping_mul(GOLDEN).wrapping_add(0x632B_E59B_D9B4_E019));
    mix64(b ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93).wrapping_add(GOLDEN))
}

pub fn stream_rng(master: u64, domain: u64, index: u64) -> StreamRng {
    StreamRng::seed_from_u64(stream_seed(master, domain, index))
}

/// Stream domains used by the crate. Distinct domains keep e.g. the
/// dynamics-side initial conditions independent of the limit-law noise.
pub mod domain {
    pub const INITIAL_CONDITIONS: u64 = 1;
    pub const LIMIT_DRIVER: u64 = 2;
    pub const LIMIT_NOISE: u64 = 3;
    pub const ESTIMATOR: u64 = 4;
    pub const CENTERING: u64 = 5;
    pub const HORIZON: u64 = 6;
    pub const REFERENCE: u64 = 7;
}
