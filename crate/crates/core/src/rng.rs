//! Counter-based random substreams.
//!
//! Every Monte Carlo trial draws from its own generator keyed by
//! `(seed, point, trial)`, so results do not depend on how trials are split
//! across threads or batches, and any single trial can be replayed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn splitmix64(state: &mut u64) {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    *state = z ^ (z >> 31);
}

/// Independent generator for one `(seed, point, trial)` triple.
pub fn substream(seed: u64, point: u64, trial: u64) -> ChaCha8Rng {
    // Mix the triple into a 256-bit ChaCha key so nearby counters do not
    // produce related streams.
    let mut key = [0u8; 32];
    let mut s = seed ^ 0x6a09_e667_f3bc_c908;
    splitmix64(&mut s);
    s ^= point.wrapping_mul(0xbb67_ae85_84ca_a73b);
    splitmix64(&mut s);
    s ^= trial.wrapping_mul(0x3c6e_f372_fe94_f82b);
    splitmix64(&mut s);
    for chunk in key.chunks_exact_mut(8) {
        splitmix64(&mut s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// One standard normal draw (Box-Muller, cosine branch).
///
/// Generated in f64 regardless of the consumer's scalar type so that the
/// random stream is identical for f32 and f64 runs.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1], keeps ln finite
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
