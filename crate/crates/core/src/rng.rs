//! Reproducible per-trial random streams.
//!
//! Every trial of every sweep point gets its own ChaCha8 stream. The key is
//! derived from the master seed and the point index, the 64-bit ChaCha stream
//! id is the trial index. Streams are addressed, not handed out in sequence,
//! so the values a trial sees never depend on which worker ran it or when.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream for `(master_seed, point_index, trial_index)`.
pub fn derive_stream(master_seed: u64, point_index: u64, trial_index: u64) -> TrialRng {
    let a = splitmix64(master_seed);
    let b = splitmix64(a ^ point_index);
    let c = splitmix64(b ^ 0x6a09_e667_f3bc_c908);
    let d = splitmix64(c ^ point_index.rotate_left(32));
    let mut key = [0u8; 32];
    for (chunk, word) in key.chunks_exact_mut(8).zip([a, b, c, d]) {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial_index);
    rng
}
