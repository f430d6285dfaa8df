//! Counter-based seed derivation.
//!
//! A [`SeedSpec`] names one random stream family. Child generators are keyed
//! by a pair of 32-bit labels, packed into the 64-bit ChaCha stream id, so
//! every `(a, b)` pair gets its own non-overlapping stream and any single
//! draw can be reproduced without replaying the others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    master: u64,
}

impl SeedSpec {
    pub const fn new(master: u64) -> Self {
        Self { master }
    }

    pub const fn master(&self) -> u64 {
        self.master
    }

    /// Independent family for a different purpose (bootstrap, sample
    /// points, ...). Tags are mixed with SplitMix64.
    pub fn derive(&self, tag: u64) -> SeedSpec {
        SeedSpec::new(splitmix64(self.master ^ splitmix64(tag.wrapping_add(0x5851_f42d_4c95_7f2d))))
    }

    /// Generator for the stream labelled `(a, b)`, e.g. (eigenspace, sample).
    pub fn rng(&self, a: u32, b: u32) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(((a as u64) << 32) | b as u64);
        rng
    }
}

impl From<u64> for SeedSpec {
    fn from(master: u64) -> Self {
        SeedSpec::new(master)
    }
}

pub(crate) fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
