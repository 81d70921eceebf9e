//! Seed plumbing. Every random decision in the crate flows through a
//! [`ChaCha8Rng`] so that a run is reproducible across platforms; per-scene
//! streams are derived by hashing (master seed, scene index) so scenes can
//! be generated concurrently without coordination.

use rand_chacha::rand_core::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// Mixes a master seed with a stream index into an independent 64-bit seed
/// (splitmix64-style finalizer).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut h = master ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1));
    h ^= h >> 30;
    h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    h ^= h >> 27;
    h = h.wrapping_mul(0x94D0_49BB_1331_11EB);
    h ^ (h >> 31)
}

/// Deterministic generator for one derived stream.
pub fn stream_rng(master: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, index))
}

/// Deterministic generator seeded directly.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derived_seeds_are_distinct_and_stable() {
        let a = derive_seed(42, 0);
        let b = derive_seed(42, 1);
        let c = derive_seed(43, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(42, 0));
    }

    #[test]
    fn streams_reproduce() {
        let mut r1 = stream_rng(7, 3);
        let mut r2 = stream_rng(7, 3);
        for _ in 0..16 {
            assert_eq!(r1.random::<u64>(), r2.random::<u64>());
        }
    }
}
