//! Counter-based seed tree.
//!
//! Every random stream is addressed by a path of integer tags below a master
//! seed, so the value drawn for a work unit does not depend on which thread
//! runs it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A node in the seed tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedKey(u64);

impl SeedKey {
    pub fn new(master: u64) -> Self {
        SeedKey(splitmix64(master))
    }

    pub fn child(self, tag: u64) -> Self {
        SeedKey(splitmix64(
            self.0 ^ splitmix64(tag.wrapping_add(0x632B_E59B_D9B4_E019)),
        ))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// Stream tags shared by the simulator and the experiments.
pub mod tag {
    pub const DEPLOYMENT: u64 = 1;
    pub const ACTIVITY: u64 = 2;
    pub const FADING: u64 = 3;
    pub const USERS: u64 = 4;
    pub const SAMPLE: u64 = 5;
    pub const MEASUREMENT: u64 = 6;
    pub const DROP: u64 = 7;
    pub const POINT: u64 = 8;
}
