//! Counter-based random number streams.
//!
//! Monte Carlo trials are keyed by `(master_seed, trial_index)`: each trial
//! owns an independent ChaCha stream, so results are reproducible regardless
//! of execution order or thread count, and any single trial can be replayed
//! in isolation.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fixed domain constant mixed into the key so that independently chosen
/// small seeds (0, 1, 2, ...) do not collide with other ChaCha users.
const DOMAIN_TAG: u64 = 0x6c6f_6370_726f_6221; // "locprob!"

/// Independent random stream for one `(master_seed, trial_index)` pair.
pub fn trial_rng(master_seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&DOMAIN_TAG.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(trial_index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = trial_rng(7, 3).sample_iter(rand::distributions::Standard).take(8).collect();
        let b: Vec<u64> = trial_rng(7, 3).sample_iter(rand::distributions::Standard).take(8).collect();
        let c: Vec<u64> = trial_rng(7, 4).sample_iter(rand::distributions::Standard).take(8).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn master_seed_changes_stream() {
        let mut a = trial_rng(1, 0);
        let mut b = trial_rng(2, 0);
        assert_ne!(a.gen::<u64>(), b.gen::<u64>());
    }
}
