//! Seeded randomness.
//!
//! Every random choice in the crate is drawn from ChaCha8 (`rand_chacha`)
//! seeded through `SeedableRng::seed_from_u64`. Independent streams are keyed
//! by mixing a base seed with a stream index through SplitMix64, so outputs
//! are reproducible across runs and platforms for a fixed seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name recorded in manifests so fixtures can be regenerated.
pub const RNG_NAME: &str = "chacha8";

pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of stream `index` under `domain`, derived from `seed`.
pub fn derive_seed(seed: u64, domain: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(domain)) ^ index)
}

pub fn stream(seed: u64, domain: u64, index: u64) -> Rng {
    rng_from_seed(derive_seed(seed, domain, index))
}
