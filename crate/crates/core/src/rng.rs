//! Counter-based splittable random streams.
//!
//! A [`Stream`] is a 128-bit key derived from `(master seed, label path,
//! counter path)`. Deriving a child never consumes randomness, so the
//! substream used for trial `i` depends only on the seed, the labels and
//! `i`, never on which worker happens to run it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Stream {
    key: [u64; 2],
}

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn hash_label(label: &str) -> u64 {
    // FNV-1a, then finalised
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    mix64(h)
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream { key: [mix64(seed ^ 0x9e37_79b9_7f4a_7c15), mix64(!seed)] }
    }

    fn derive(&self, tag: u64, x: u64) -> Stream {
        let a = mix64(self.key[0] ^ mix64(x.wrapping_add(tag)));
        let b = mix64(self.key[1].wrapping_add(a) ^ tag.rotate_left(17) ^ x);
        Stream { key: [a, b] }
    }

    /// Child stream for a named purpose.
    pub fn split(&self, label: &str) -> Stream {
        self.derive(0x5bd1_e995, hash_label(label))
    }

    /// Child stream for a counter value (trial index, step index, ...).
    pub fn index(&self, i: u64) -> Stream {
        self.derive(0x2545_f491_4f6c_dd1d, i)
    }

    pub fn rng(&self) -> StreamRng {
        let mut seed = [0u8; 32];
        let words = [self.key[0], self.key[1], mix64(self.key[0] ^ 1), mix64(self.key[1] ^ 2)];
        for (chunk, w) in seed.chunks_exact_mut(8).zip(words) {
            chunk.copy_from_slice(&w.to_le_bytes());
        }
        ChaCha8Rng::from_seed(seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn deterministic_and_distinct() {
        let s = Stream::new(42);
        let a: u64 = s.split("x").index(3).rng().gen();
        let b: u64 = Stream::new(42).split("x").index(3).rng().gen();
        assert_eq!(a, b);
        let c: u64 = s.split("x").index(4).rng().gen();
        let d: u64 = s.split("y").index(3).rng().gen();
        let e: u64 = Stream::new(43).split("x").index(3).rng().gen();
        assert!(a != c && a != d && a != e);
        assert_ne!(s.index(1).index(2), s.index(2).index(1));
    }

    #[test]
    fn bits_look_balanced() {
        let s = Stream::new(1);
        let ones: u32 = (0..4096u64).map(|i| s.index(i).rng().gen::<u64>().count_ones()).sum();
        let mean = ones as f64 / 4096.0;
        assert!((mean - 32.0).abs() < 0.5, "mean popcount {mean}");
    }
}
