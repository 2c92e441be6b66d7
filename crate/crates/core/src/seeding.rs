//! Named, reproducible random substreams.
//!
//! All randomness in a run flows from one master seed. Each consumer takes
//! a named substream so that adding a draw in one place never shifts the
//! values another place sees.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// FNV-1a over the UTF-8 bytes of `name`.
pub fn name_hash(name: &str) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for byte in name.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// The rng for `name`'s substream under `master`.
pub fn substream(master: u64, name: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(name_hash(name));
    rng
}
