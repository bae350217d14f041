#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use submanifold::EmbeddingMap;

/// `count` points drawn uniformly from the open chart box.
pub fn sample_points(map: &EmbeddingMap, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            map.domain
                .iter()
                .map(|iv| loop {
                    let x = rng.gen_range(iv.lo..iv.hi);
                    if iv.contains_open(x) {
                        break x;
                    }
                })
                .collect()
        })
        .collect()
}

/// Multi-index exponents expanded into a list of differentiation directions.
pub fn directions(alpha: &[u8]) -> Vec<usize> {
    alpha.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize)).collect()
}
