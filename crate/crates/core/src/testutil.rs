use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ensemble::{ConsistentEnsemble, MatrixEnsemble};

pub fn random_ensemble(n: usize, side: usize, seed: u64) -> MatrixEnsemble {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    MatrixEnsemble::from_fn(n, side, |_, out| {
        for z in out {
            *z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    })
}

pub fn random_consistent(n: usize, m: usize, seed: u64) -> ConsistentEnsemble {
    ConsistentEnsemble::new(m, random_ensemble(n, m / 2, seed)).unwrap()
}
