//! Deterministic seed derivation.
//!
//! Every random quantity in this crate is drawn from a ChaCha8 generator
//! seeded through this module, so one instance seed reproduces a whole
//! run bit-for-bit on any platform. Sub-seeds are derived by folding a
//! stream tag and an index into the master seed with splitmix64 steps:
//!
//! ```text
//! sub = mix(mix(seed + mix(tag)) + mix(index))
//! ```
//!
//! Distinct (tag, index) pairs give statistically independent streams and
//! the derivation never mutates shared state, so parallel consumers can
//! compute their own seeds in any order.

/// Stream tags. Values are arbitrary but frozen: changing them changes
/// every derived sequence.
pub mod stream {
    pub const LABELS: u64 = 1;
    pub const FEATURE_INDICES: u64 = 2;
    pub const SIGNAL_MEANS: u64 = 3;
    pub const SIGMAS: u64 = 4;
    pub const NOISE: u64 = 5;
    pub const LATENT: u64 = 6;
    pub const LIFT: u64 = 7;
    pub const KS_NULL: u64 = 8;
    pub const F_NULL: u64 = 9;
    pub const KMEANS: u64 = 10;
    pub const INSTANCE: u64 = 11;
    pub const PIPELINE: u64 = 12;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the sub-seed for (`tag`, `index`) under `seed`.
pub fn derive(seed: u64, tag: u64, index: u64) -> u64 {
    let a = splitmix64(seed.wrapping_add(splitmix64(tag)));
    splitmix64(a.wrapping_add(splitmix64(index)))
}
