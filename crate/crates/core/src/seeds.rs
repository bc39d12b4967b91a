//! Counter-based seed derivation. Every random stream is keyed by a tuple of
//! counters, so results never depend on how many draws happened elsewhere.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes an ordered tuple of counters into one seed.
pub fn derive(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x6A09_E667_F3BC_C908, |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Seed for a named sub-stream (e.g. one generator) of a scenario seed.
pub fn for_label(seed: u64, label: &str) -> u64 {
    // FNV-1a
    let hash = label
        .bytes()
        .fold(0xCBF2_9CE4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01B3));
    derive(&[seed, hash])
}

pub fn trip_rng(seed: u64, epoch: u64, trip: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(&[seed, epoch, trip]))
}
