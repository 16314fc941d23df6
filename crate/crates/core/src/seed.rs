//! Counter-based seed derivation.
//!
//! Every random stream in a simulation is keyed by `(master, domain, index)`
//! so that work can be split across threads in any order and still reproduce
//! bit-identically.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream used for the per-experiment random generator.
pub type Stream = ChaCha8Rng;

/// Independent seed domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Sessions = 0x5345_5353,
    OnOff = 0x4f4e_4f46,
    Replicate = 0x5245_504c,
    Path = 0x5041_5448,
    Noise = 0x4e4f_4953,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed; distinct `(domain, index)` pairs give unrelated seeds.
pub fn derive(master: u64, domain: Domain, index: u64) -> u64 {
    let a = splitmix64(master ^ (domain as u64).rotate_left(17));
    splitmix64(a ^ splitmix64(index.wrapping_add(0x632b_e59b_d9b4_e019)))
}

pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}
