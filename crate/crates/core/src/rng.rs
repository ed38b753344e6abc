//! Counter-based hashing and seeded streams.
//!
//! Everything random in the crate is a pure function of a 64-bit master seed
//! and some integer coordinates. The instruction field uses the SplitMix64
//! finalizer directly (one multiply-xorshift chain per draw); everything that
//! consumes an ordered stream of variates uses ChaCha8 seeded from a derived key.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
#[inline(always)]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a master seed and a path of integer labels.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut h = mix64(master ^ 0x5851_F42D_4C95_7F2D);
    for &p in path {
        h = mix64(h.wrapping_add(GOLDEN_GAMMA) ^ mix64(p.wrapping_add(0x2545_F491_4F6C_DD1D)));
    }
    h
}

/// Key of a lattice site under a given seed. Keys depend on coordinates only,
/// so two domains that contain the same site agree on its key.
pub fn site_key(seed: u64, coords: &[i64]) -> u64 {
    let mut h = mix64(seed);
    for &c in coords {
        h = mix64(h ^ (c as u64).wrapping_mul(GOLDEN_GAMMA).wrapping_add(0x632B_E59B_D9B4_E019));
    }
    h
}

/// Uniform in [0, 1) from the top 53 bits.
#[inline(always)]
pub fn unit_f64(u: u64) -> f64 {
    (u >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
