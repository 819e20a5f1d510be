//! Deterministic seed derivation.
//!
//! Every random stream in the crate is a `ChaCha12Rng` seeded through
//! [`derive`], so independent stages never share state and reruns with the
//! same root seed are bit-identical.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// splitmix64 finalizer; good avalanche for combining seed words.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a root seed and a path of stream labels.
pub fn derive(root: u64, path: &[u64]) -> u64 {
    let mut acc = mix(root);
    for &p in path {
        acc = mix(acc ^ mix(p));
    }
    acc
}

/// RNG for a derived stream.
pub fn rng(root: u64, path: &[u64]) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(derive(root, path))
}

/// Stream labels used across the crate. Keeping them in one place avoids
/// accidental collisions between stages.
pub mod stream {
    pub const SYNTH_LAYOUT: u64 = 0x01;
    pub const SYNTH_TRAIN: u64 = 0x02;
    pub const SYNTH_TEST: u64 = 0x03;
    pub const VQVAE_INIT: u64 = 0x10;
    pub const VQVAE_BATCH: u64 = 0x11;
    pub const CODEBOOK_INIT: u64 = 0x12;
    pub const RESERVOIR: u64 = 0x20;
    pub const KMEANS: u64 = 0x21;
    pub const PRIOR_INIT: u64 = 0x30;
    pub const PRIOR_BATCH: u64 = 0x31;
    pub const PRIOR_TAMPER: u64 = 0x32;
    pub const SCORING: u64 = 0x40;
}
