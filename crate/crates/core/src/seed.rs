//! Seed derivation.
//!
//! Every random stream in the crate is a ChaCha8 generator keyed by a 64-bit
//! seed. Sub-streams (per trial, per column, ...) are derived from a parent
//! seed by folding each coordinate through SplitMix64:
//!
//! ```text
//! h = parent
//! for x in coords: h = splitmix64(h ^ splitmix64(x ^ 0x9E37_79B9_7F4A_7C15))
//! ```
//!
//! The fold is order-sensitive, so `derive(s, &[1, 2]) != derive(s, &[2, 1])`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One round of the SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `parent` and a coordinate path.
pub fn derive(parent: u64, coords: &[u64]) -> u64 {
    coords.iter().fold(parent, |h, &x| {
        splitmix64(h ^ splitmix64(x ^ 0x9E37_79B9_7F4A_7C15))
    })
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stable tags for the streams the crate derives, so that unrelated uses of
/// the same parent seed never collide.
pub mod stream {
    pub const GROUND_MOTION: u64 = 0x676d;
    pub const MATERIAL: u64 = 0x6d61;
    pub const MASK_COLUMN: u64 = 0x636f;
    pub const STRATUM: u64 = 0x7374;
    pub const HOLDOUT: u64 = 0x686f;
    pub const FACTOR_INIT: u64 = 0x6669;
    pub const TRIAL: u64 = 0x7472;
}
