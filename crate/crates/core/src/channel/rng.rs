//! Seeded random streams.
//!
//! Every draw in the crate comes from a ChaCha20 generator keyed by the
//! 64-bit master seed (expanded with `SeedableRng::seed_from_u64`). Each
//! `(frame, purpose)` pair selects its own ChaCha stream:
//!
//! ```text
//! stream id = (frame_id << 2) | purpose
//! ```
//!
//! so noise, fading and completion draws never share key-stream words, and
//! frames can be processed in any order or in parallel with identical
//! results. Only the low 62 bits of the frame id take part.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type StreamRng = ChaCha20Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Noise = 0,
    Fading = 1,
    Completion = 2,
    Auxiliary = 3,
}

pub fn stream_rng(seed: u64, frame_id: u64, stream: Stream) -> StreamRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream((frame_id << 2) | stream as u64);
    rng
}
