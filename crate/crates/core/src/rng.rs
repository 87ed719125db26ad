//! Seeded random streams.
//!
//! Every random object (grid, sample, cycle draw) is produced from a ChaCha8
//! generator keyed by a user seed and a stream index. ChaCha is counter based,
//! so distinct stream indices give independent sequences and replication
//! `k` of an experiment can be regenerated without replaying `0..k`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Generator for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
