//! Counter-derived random streams.
//!
//! Every stochastic step draws from a ChaCha stream keyed by
//! `(master seed, index, purpose)`, so results do not depend on the order
//! in which parallel workers pick up work.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Labels that separate independent streams derived from one index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    KDraw = 1,
    Twirl = 2,
    Shots = 3,
    Calibration = 4,
    CompileRestart = 5,
    Test = 6,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed, an index and a purpose into a 64-bit stream key.
pub fn derive_seed(master: u64, index: u64, purpose: Purpose) -> u64 {
    let a = splitmix(master);
    let b = splitmix(a ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93));
    splitmix(b ^ (purpose as u64).wrapping_mul(0xA076_1D64_78BD_642F))
}

pub fn stream(master: u64, index: u64, purpose: Purpose) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(derive_seed(master, index, purpose))
}
