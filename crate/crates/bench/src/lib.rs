//! Seeded inputs shared by the benchmarks.

use elastika::data::{Dataset, Label, Series, Split};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `len` values drawn uniformly from `[-1, 1)`.
pub fn random_values(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Random walks with a class-dependent drift, `per_class` items per class.
pub fn random_dataset(classes: usize, per_class: usize, len: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items = Vec::with_capacity(classes * per_class);
    for k in 0..classes {
        let drift = k as f64 * 0.1;
        for _ in 0..per_class {
            let mut level = 0.0;
            let values = (0..len)
                .map(|_| {
                    level += drift + rng.gen_range(-1.0..1.0);
                    level
                })
                .collect();
            items.push((Series::new(values).expect("finite"), k as Label));
        }
    }
    Dataset::new("Bench", Split::Train, items).expect("nonempty and equal length")
}
