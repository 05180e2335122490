//! Deterministic random stream derivation.
//!
//! Every agent (and every Monte Carlo replication) draws from its own
//! counter-based ChaCha stream derived from `(run seed, stream id)`.
//! Simulation output therefore does not depend on how the agent set is
//! iterated, and replications can be evaluated in parallel without
//! touching a shared generator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a salt into a seed, producing an independent derived seed.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut state = seed ^ salt.wrapping_mul(0xA24B_AED4_963E_E407);
    splitmix64(&mut state)
}

/// Build the ChaCha stream for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut state = seed ^ stream.wrapping_mul(0xD6E8_FEB8_6659_FD93);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
