//! Named random streams derived from one master seed.
//!
//! Every consumer of randomness gets its own ChaCha stream keyed by the
//! master seed, so enabling or disabling one feature never shifts the
//! draws seen by another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    UserPlacement,
    UavInit,
    BaselinePlacement,
    Channel,
    /// Strategy sampling of one UAV agent.
    Agent(usize),
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::UserPlacement => 1,
            Stream::UavInit => 2,
            Stream::BaselinePlacement => 3,
            Stream::Channel => 4,
            Stream::Agent(i) => 1024 + i as u64,
        }
    }
}

pub fn stream(master_seed: u64, which: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(which.id());
    rng
}
