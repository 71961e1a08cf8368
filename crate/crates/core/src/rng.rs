//! Reproducible random streams.
//!
//! Every Monte Carlo consumer derives an independent ChaCha8 stream from a
//! `(seed, stream)` pair. ChaCha is a counter-based generator, so the draws of
//! stream `k` do not depend on how many other streams exist or which thread
//! consumes them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A seed for a sub-experiment, derived from a parent seed and a label.
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ label.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
