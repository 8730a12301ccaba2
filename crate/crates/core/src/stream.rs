//! Reproducible per-image random streams.
//!
//! A stream is a ChaCha8 generator keyed by a 64-bit *stream key*. The key for
//! image `ordinal` of a run seeded with `master_seed` is
//!
//! ```text
//! key = splitmix64_finalize(master_seed + (ordinal + 1) * 0x9E3779B97F4A7C15)
//! ```
//!
//! For a fixed seed the map `ordinal -> key` is injective (odd multiplier,
//! bijective finalizer), so distinct images never share a key. The 256-bit
//! ChaCha key is four successive SplitMix64 outputs seeded by `key`.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream key for `(master_seed, ordinal)`.
pub fn stream_key(master_seed: u64, ordinal: u64) -> u64 {
    mix64(master_seed.wrapping_add(ordinal.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Stream for image `ordinal` of a run seeded with `master_seed`.
pub fn derive_stream(master_seed: u64, ordinal: u64) -> RandomStream {
    RandomStream::from_key(stream_key(master_seed, ordinal))
}

#[derive(Debug, Clone)]
pub struct RandomStream {
    key: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn from_key(key: u64) -> Self {
        let mut seed = [0u8; 32];
        let mut state = key;
        for chunk in seed.chunks_exact_mut(8) {
            state = state.wrapping_add(GOLDEN_GAMMA);
            chunk.copy_from_slice(&mix64(state).to_le_bytes());
        }
        Self {
            key,
            rng: ChaCha8Rng::from_seed(seed),
        }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `[lo, hi)`; returns `lo` when the range is empty.
    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Unbiased integer in `[0, n)` (Lemire's widening multiply with
    /// rejection). `n` must be non-zero.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }
}
