//! Seeded quasi-random sampling shared by the numerical checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PRIMES: [u32; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical inverse of `i` in base `b`.
fn radical_inverse(mut i: u64, b: u32) -> f64 {
    let b = u64::from(b);
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut out = 0.0;
    while i > 0 {
        out += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    out
}

/// Halton sequence in `[0,1)^D` with a Cranley–Patterson shift drawn from
/// `seed`, so different seeds give different but equally uniform point sets.
pub struct Halton<const D: usize> {
    index: u64,
    shift: [f64; D],
}

impl<const D: usize> Halton<D> {
    pub fn new(seed: u64) -> Self {
        assert!(D <= PRIMES.len(), "at most {} dimensions", PRIMES.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Halton {
            // Index 0 is the origin in every base; start past it.
            index: 1,
            shift: std::array::from_fn(|_| rng.random::<f64>()),
        }
    }
}

impl<const D: usize> Iterator for Halton<D> {
    type Item = [f64; D];

    fn next(&mut self) -> Option<[f64; D]> {
        let i = self.index;
        self.index += 1;
        Some(std::array::from_fn(|k| {
            let u = radical_inverse(i, PRIMES[k]) + self.shift[k];
            u - u.floor()
        }))
    }
}

/// Maps a unit-cube point onto the box `lo[k] ≤ x_k < hi[k]`.
pub fn scale<const D: usize>(u: [f64; D], lo: [f64; D], hi: [f64; D]) -> [f64; D] {
    std::array::from_fn(|k| lo[k] + (hi[k] - lo[k]) * u[k])
}
