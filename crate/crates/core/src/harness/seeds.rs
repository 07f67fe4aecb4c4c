//! Per-replicate random streams derived from the master seed, so results do
//! not depend on execution order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for; distinct purposes never share draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamPurpose {
    PreLimit = 1,
    Limit = 2,
    Hill = 3,
    Uncentered = 4,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for `(master, n, replicate, purpose)`.
pub fn derive_seed(master: u64, n: u64, replicate: u64, purpose: StreamPurpose) -> u64 {
    [n, replicate, purpose as u64]
        .into_iter()
        .fold(splitmix64(master), |acc, part| {
            splitmix64(acc ^ splitmix64(part))
        })
}

pub fn stream(master: u64, n: u64, replicate: u64, purpose: StreamPurpose) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, n, replicate, purpose))
}
