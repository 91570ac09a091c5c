//! Deterministic seed derivation.
//!
//! Every random decision draws from a ChaCha8 stream keyed by a SHA-256 digest
//! of its context, so a sample's bytes never depend on what else was generated
//! or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::Tier;

fn absorb(h: &mut Sha256, bytes: &[u8]) {
    h.update((bytes.len() as u64).to_le_bytes());
    h.update(bytes);
}

/// Seed of one sample: master seed, source key, tier and epoch.
pub fn sample_seed(master_seed: u64, key: &str, tier: Tier, epoch: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(b"angio.sample");
    h.update(master_seed.to_le_bytes());
    absorb(&mut h, key.as_bytes());
    absorb(&mut h, tier.as_str().as_bytes());
    h.update((epoch as u64).to_le_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

/// Independent stream for one transform of a sample.
pub fn transform_rng(seed: u64, transform: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(b"angio.transform");
    h.update(seed.to_le_bytes());
    absorb(&mut h, transform.as_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}
