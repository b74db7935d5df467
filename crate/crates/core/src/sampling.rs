//! Deterministic sample streams: low-discrepancy points and seeded RNGs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

/// Halton sequence in bases 2 and 3, skipping the origin.
#[derive(Debug, Clone)]
pub struct Halton2 {
    index: u64,
}

impl Default for Halton2 {
    fn default() -> Self {
        Self::new()
    }
}

impl Halton2 {
    pub fn new() -> Self {
        Self { index: 1 }
    }

    pub fn next_unit(&mut self) -> (f64, f64) {
        let i = self.index;
        self.index += 1;
        (radical_inverse(i, 2), radical_inverse(i, 3))
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_values() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(5, 3) - (2.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-15);
    }
}
