//! Deterministic seed derivation for parallel replicate streams.
//!
//! Each replicate gets its own generator seed computed from the base seed and
//! the replicate index alone, so serial and parallel runs (any worker count)
//! draw identical streams.

/// SplitMix64 finalizer. Decorrelates consecutive indices into independent seeds.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed for stream `index` from `base`.
pub fn derive(base: u64, index: u64) -> u64 {
    // Two finalizer rounds: one mixing the index, one mixing the base,
    // so that neighbouring (base, index) pairs land far apart.
    splitmix64(base ^ splitmix64(index.wrapping_add(1)))
}
