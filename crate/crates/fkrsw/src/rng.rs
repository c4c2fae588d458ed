//! Seeded, splittable random streams.
//!
//! All randomness derives from one 64-bit master seed. Independent streams
//! are ChaCha8 generators sharing the master key, with the 64-bit stream id
//! derived from a purpose label and a chain index (FNV-1a over the label,
//! mixed with the index). Runs are bit-reproducible for a fixed seed and
//! independent of worker count, since every consumer names its own stream.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// A stream keyed by (purpose, index) under the master seed.
pub fn stream(master: u64, purpose: &str, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(fnv1a(purpose.as_bytes()) ^ index.wrapping_mul(0x9e3779b97f4a7c15));
    rng
}

/// A stream keyed by (purpose, index, subindex).
pub fn stream2(master: u64, purpose: &str, index: u64, sub: u64) -> ChaCha8Rng {
    let mixed = index
        .wrapping_mul(0x9e3779b97f4a7c15)
        .wrapping_add(sub.wrapping_mul(0xbf58476d1ce4e5b9));
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(fnv1a(purpose.as_bytes()) ^ mixed);
    rng
}
