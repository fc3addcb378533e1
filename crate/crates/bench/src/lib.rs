//! Seeded inputs shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fepkit::testgen::{complex_normal, planted_jordan};
use fepkit::ComplexMatrix;

/// A single Jordan block of size `n / 2` at zero plus simple eigenvalues.
pub fn planted(n: usize) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    planted_jordan(&[n / 2], n - n / 2, 1.0, &mut rng).h
}

pub fn random(n: usize) -> ComplexMatrix {
    complex_normal(n, &mut ChaCha8Rng::seed_from_u64(0xbe7c ^ n as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_deterministic() {
        assert_eq!(planted(8), planted(8));
        assert_eq!(random(5).n(), 5);
    }
}
