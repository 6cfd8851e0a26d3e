//! Seeded ChaCha streams, one per randomized subsystem.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Subsystem labels mixed into the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamLabel {
    SetCoverClocks = 1,
    MatchingThresholds = 2,
    MstThresholds = 3,
}

/// A generator for `(label, id)`. Different ids give independent streams, so
/// a value can be regenerated without drawing everything before it.
pub fn labeled_rng(seed: u64, label: StreamLabel, id: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(label as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(id);
    rng
}
