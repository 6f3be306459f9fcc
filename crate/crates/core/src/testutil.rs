use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::zak::{GridShape, PeriodicSequence, ZakGrid};

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub(crate) fn random_sequence(period: usize, seed: u64) -> PeriodicSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PeriodicSequence::from_fn(period, |_| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub(crate) fn random_grid(shape: GridShape, seed: u64) -> ZakGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ZakGrid::from_fn(shape, |_, _| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}
