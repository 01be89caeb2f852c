//! Explicitly seeded, splittable random streams.
//!
//! Every random quantity in a simulation (a channel draw, a sample batch, one
//! Monte Carlo trial) owns a [`Stream`]. Child streams are derived by mixing a
//! tag into the parent seed, so two streams never share generator state and
//! results do not depend on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used by all simulation code.
pub type SimRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Stream(u64);

impl Stream {
    pub const fn new(seed: u64) -> Self {
        Stream(seed)
    }

    pub fn seed(self) -> u64 {
        self.0
    }

    /// Derives an independent child stream identified by `tag`.
    pub fn child(self, tag: u64) -> Stream {
        Stream(splitmix64(self.0 ^ splitmix64(tag.wrapping_add(0x632b_e59b_d9b4_e019))))
    }

    /// Derives a child by a path of tags, e.g. `[point, trial]`.
    pub fn path(self, tags: &[u64]) -> Stream {
        tags.iter().fold(self, |s, &t| s.child(t))
    }

    pub fn rng(self) -> SimRng {
        SimRng::seed_from_u64(self.0)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
