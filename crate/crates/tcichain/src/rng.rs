//! Seed plumbing. Every random draw in the crate comes from a counter-based
//! generator keyed by `(master seed, stream)`, so any component can be run in
//! isolation or in parallel and still reproduce bit-identical output.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fixed stream tags, one per independent consumer.
pub mod streams {
    pub const SAMPLING: u64 = 1;
    pub const READOUT: u64 = 2;
    pub const OPTIMIZER: u64 = 3;
    pub const LANCZOS: u64 = 4;
    pub const TRIALS: u64 = 5;
}

/// Generator for `stream` derived from the master seed.
pub fn derive(master: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

/// Sub-stream for indexed tasks (restarts, sweep points, ladder rungs).
pub fn derive_indexed(master: u64, stream: u64, index: u64) -> ChaCha8Rng {
    // streams are 64-bit; pack (stream, index) injectively for small tags
    derive(master, stream.wrapping_mul(0x1_0000_0000).wrapping_add(index))
}
