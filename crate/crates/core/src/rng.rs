//! Seeded generators. Every random draw in the simulator goes through a
//! generator built here, so a seed fully determines a run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator algorithm identifier, recorded in run metadata.
pub const RNG_ALGORITHM: &str = "chacha8-rand_chacha-0.9";

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent child seed for `stream` from `seed`.
///
/// Used to give each sweep point and protocol stage its own generator, so
/// results do not depend on evaluation order.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream.wrapping_add(0x51_7c_c1_b7_27_22_0a_95)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
