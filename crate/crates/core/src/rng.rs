//! Deterministic RNG substreams.
//!
//! Every random quantity in a run is drawn from a ChaCha stream selected by a
//! base seed plus a key path such as `(trial, method, purpose)`. Streams for
//! different keys are independent, and the same key always yields the same
//! stream regardless of thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// What a substream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Graph = 1,
    Truth = 2,
    Selection = 3,
    Noise = 4,
    Run = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hashes a key path to a stream id.
pub fn stream_id(keys: &[u64]) -> u64 {
    keys.iter()
        .fold(0x6a09_e667_f3bc_c908, |acc, &k| splitmix64(acc ^ splitmix64(k)))
}

/// RNG for `seed` on the stream addressed by `keys`.
pub fn substream(seed: u64, keys: &[u64]) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(keys));
    rng
}

/// Derives a child seed, for APIs that take a plain `u64` seed.
pub fn derive_seed(seed: u64, keys: &[u64]) -> u64 {
    splitmix64(seed ^ stream_id(keys))
}
