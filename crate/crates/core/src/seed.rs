//! Seed derivation so every random stream is a pure function of
//! (master seed, stream tag, index...) and independent of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x243F_6A88_85A3_08D3, |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn rng_for(parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(parts))
}

// stream tags
pub(crate) const LABELS: u64 = 1;
pub(crate) const DEGREES: u64 = 2;
pub(crate) const TOPOLOGY: u64 = 3;
pub(crate) const ATTRIBUTES: u64 = 4;
pub(crate) const SBM: u64 = 5;
pub(crate) const SPLIT: u64 = 6;
pub(crate) const MODEL: u64 = 7;
