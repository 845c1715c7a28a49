//! Seed-derived random streams.
//!
//! Every random decision in a run draws from a ChaCha8 stream keyed by the run
//! seed and a [`Stream`] id, so phases never share state and a run is fully
//! determined by its seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use rand_chacha::ChaCha8Rng as RunRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Init = 0,
    Dropout = 1,
    RetrainInit = 2,
    RetrainDropout = 3,
    RandomMask = 4,
    Synthetic = 5,
}

pub fn stream(seed: u64, which: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}
