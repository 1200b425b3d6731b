//! The one random stream used by the simulator and Monte-Carlo estimators.
//!
//! The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`.
//! A uniform draw takes the top 53 bits of one `next_u64` output:
//! `u = (x >> 11) · 2⁻⁵³`, and a Bernoulli(p) trial succeeds iff `u < p`.
//! Any other implementation of these three steps replays draws bit-exactly.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn unit(rng: &mut Stream) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn bernoulli(rng: &mut Stream, p: f64) -> bool {
    unit(rng) < p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_is_in_half_open_interval_and_reproducible() {
        let mut a = stream(7);
        let mut b = stream(7);
        for _ in 0..1000 {
            let u = unit(&mut a);
            assert!((0.0..1.0).contains(&u));
            assert_eq!(u.to_bits(), unit(&mut b).to_bits());
        }
    }

    #[test]
    fn certain_and_impossible_trials() {
        let mut r = stream(1);
        assert!((0..1000).all(|_| bernoulli(&mut r, 1.0)));
        assert!((0..1000).all(|_| !bernoulli(&mut r, 0.0)));
    }
}
