//! Seed derivation for replications.
//!
//! Every random stream is a ChaCha8 generator seeded (through
//! `SeedableRng::seed_from_u64`) with a 64-bit seed derived as
//!
//! ```text
//! h0   = splitmix64(base_seed)
//! h1   = splitmix64(h0 ^ n)
//! h2   = splitmix64(h1 ^ rep_index)
//! seed = splitmix64(h2 ^ stream_tag)
//! ```
//!
//! where `splitmix64` is the finalizer of Steele, Lea and Flood's SplitMix64
//! applied after adding the golden-gamma increment. Stream tags are fixed
//! ASCII constants, so train, test and probe streams come from disjoint
//! derivation domains.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STREAM_TRAIN: u64 = u64::from_be_bytes(*b"cs:train");
pub const STREAM_TEST: u64 = u64::from_be_bytes(*b"cs:test\0");
pub const STREAM_PROBE: u64 = u64::from_be_bytes(*b"cs:probe");

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(base_seed: u64, n: u64, rep_index: u64, stream_tag: u64) -> u64 {
    let h = splitmix64(base_seed);
    let h = splitmix64(h ^ n);
    let h = splitmix64(h ^ rep_index);
    splitmix64(h ^ stream_tag)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
