//! Keyed random streams.
//!
//! A stream is a `(seed, key)` pair. The generator is ChaCha12 whose 256-bit
//! key is the first four outputs of SplitMix64 started at `seed`
//! (little-endian), with the ChaCha stream id set to `key`. Identical pairs
//! give identical draws, distinct keys give independent ChaCha streams.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// The generator behind every [`RngStream`].
pub type StreamRng = ChaCha12Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    seed: u64,
    key: u64,
}

pub const ALGORITHM: &str = "chacha12-splitmix64";

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a sequence of words into one 64-bit value. Each word is folded in
/// through a full SplitMix64 finalization, so sequences of equal length
/// that differ anywhere map to unrelated outputs.
pub fn mix(words: &[u64]) -> u64 {
    let mut acc = 0x6A09_E667_F3BC_C908u64;
    for &w in words {
        let mut state = acc ^ w;
        acc = splitmix64(&mut state);
    }
    acc
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, key: 0 }
    }

    pub fn with_key(seed: u64, key: u64) -> Self {
        Self { seed, key }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// A child stream whose key is derived from this key and `parts`.
    pub fn substream(&self, parts: &[u64]) -> Self {
        let mut words = alloc::vec::Vec::with_capacity(parts.len() + 1);
        words.push(self.key);
        words.extend_from_slice(parts);
        Self {
            seed: self.seed,
            key: mix(&words),
        }
    }

    pub fn rng(&self) -> StreamRng {
        let mut state = self.seed;
        let mut bytes = [0u8; 32];
        for chunk in bytes.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha12Rng::from_seed(bytes);
        rng.set_stream(self.key);
        rng
    }
}
