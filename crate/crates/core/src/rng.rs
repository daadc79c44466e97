//! Counter-based randomness.
//!
//! Every draw is a pure function of `(seed, stream)` passed through the
//! SplitMix64 finalizer, so results do not depend on iteration order or on
//! how work is split across threads. A sampled pair `(i, j)` with `i < j`
//! uses exactly one draw, keyed by `(seed, i, j)`.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent child seed for stream `stream` of `seed`.
#[inline]
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    mix64(mix64(seed ^ GOLDEN).wrapping_add(stream.wrapping_mul(GOLDEN)))
}

/// Uniform draw in `[0, 1)` for the unordered pair `i < j`.
#[inline]
pub fn pair_uniform(seed: u64, i: usize, j: usize) -> f64 {
    let key = ((i as u64) << 32) | (j as u64 & 0xffff_ffff);
    to_unit(derive_seed(seed, key))
}

/// Top 53 bits as a float in `[0, 1)`.
#[inline]
pub fn to_unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Stable 64-bit hash of a byte string (FNV-1a, then mixed).
pub fn hash_bytes(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    mix64(h)
}
