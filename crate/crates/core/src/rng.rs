//! Seeded, splittable random streams.
//!
//! Every random draw in the crate goes through a [`SeedProvenance`]: a master
//! seed plus a 64-bit stream id. Streams are ChaCha8 keystreams selected by
//! `set_stream`, so (replication, split) pairs get independent generators that
//! do not depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use rand_chacha::ChaCha8Rng as StreamRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedProvenance {
    pub master: u64,
    pub stream: u64,
}

impl SeedProvenance {
    pub const fn new(master: u64, stream: u64) -> Self {
        SeedProvenance { master, stream }
    }

    pub const fn from_master(master: u64) -> Self {
        SeedProvenance { master, stream: 0 }
    }

    /// Derives an independent child stream, e.g. one per replication or split.
    pub fn child(self, tag: u64) -> Self {
        SeedProvenance { master: self.master, stream: splitmix64(self.stream ^ splitmix64(tag)) }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.stream);
        rng
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
