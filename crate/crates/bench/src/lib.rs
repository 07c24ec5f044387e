//! Synthetic workloads for the benchmarks.

use grouprank_core::{RatingMatrix, RatingScale};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A rating matrix where each user rates `degree` random objects around a
/// hidden per-object quality, with ±1 noise.
pub fn synthetic_matrix(users: usize, objects: usize, degree: usize, seed: u64) -> RatingMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quality: Vec<i32> = (0..objects).map(|_| rng.random_range(1..=5)).collect();
    let rows: Vec<Vec<(u32, i32)>> = (0..users)
        .map(|_| {
            index::sample(&mut rng, objects, degree)
                .into_iter()
                .map(|o| {
                    (
                        o as u32,
                        (quality[o] + rng.random_range(-1..=1)).clamp(1, 5),
                    )
                })
                .collect()
        })
        .collect();
    RatingMatrix::from_values(objects, RatingScale::default(), &rows).expect("valid synthetic rows")
}

/// Roughly the size of the filtered MovieLens-100K matrix.
pub fn movielens_sized() -> RatingMatrix {
    synthetic_matrix(943, 1682, 106, 7)
}
