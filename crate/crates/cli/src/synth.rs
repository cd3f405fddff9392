//! Small synthetic datasets shipped with the repository.

use elastika::data::{Dataset, Label, RngSeed, Series, Split};
use elastika::Result;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub const NAMES: [&str; 3] = ["HeadTail", "CBF", "Waves"];

type Generator = fn(Label, &mut ChaCha8Rng) -> Vec<f64>;

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn build(
    name: &str,
    split: Split,
    per_class: usize,
    classes: &[Label],
    rng: &mut ChaCha8Rng,
    make: impl Fn(Label, &mut ChaCha8Rng) -> Vec<f64>,
) -> Result<Dataset> {
    let mut items = Vec::new();
    for _ in 0..per_class {
        for &label in classes {
            items.push((Series::new(make(label, rng))?, label));
        }
    }
    Dataset::new(name, split, items)
}

/// Class 1 has a tall head and a small alternating tail. Class 2 keeps only
/// one of the two parts, so small exponents and large exponents disagree on
/// which class 2 items look closest.
fn head_tail(label: Label, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let len: usize = 20;
    let offset: usize = rng.gen_range(0..2);
    let keep_head = label == 1 || rng.gen_bool(0.5);
    let keep_tail = label == 1 || !keep_head;
    (0..len)
        .map(|i| {
            let head = match i.checked_sub(offset) {
                Some(1) if keep_head => 5.0,
                Some(3) if keep_head => -5.0,
                _ => 0.0,
            };
            let tail = if i >= 5 && keep_tail {
                if i % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            } else {
                0.0
            };
            head + tail + 0.3 * normal(rng)
        })
        .collect()
}

/// Cylinder (1), bell (2) and funnel (3) shapes with random onset and length.
fn cbf(label: Label, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let len = 64;
    let a = rng.gen_range(8..16);
    let b = (a + rng.gen_range(16..=40)).min(len - 1);
    let amp = 6.0 + normal(rng);
    (0..len)
        .map(|t| {
            let inside = (a..=b).contains(&t);
            let frac = (t as f64 - a as f64) / (b - a) as f64;
            let shape = match (label, inside) {
                (_, false) => 0.0,
                (1, true) => 1.0,
                (2, true) => frac,
                _ => 1.0 - frac,
            };
            amp * shape + normal(rng)
        })
        .collect()
}

/// Sine (1) against square (2) waves with random phase and period.
fn waves(label: Label, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let len = 48;
    let period = rng.gen_range(10.0..14.0);
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    (0..len)
        .map(|t| {
            let x = std::f64::consts::TAU * t as f64 / period + phase;
            let v = if label == 1 {
                x.sin()
            } else {
                x.sin().signum()
            };
            v + 0.2 * normal(rng)
        })
        .collect()
}

/// Train and test splits for every dataset in [`NAMES`].
pub fn generate(seed: RngSeed) -> Result<Vec<(Dataset, Dataset)>> {
    let mut out = Vec::new();
    for (k, name) in NAMES.iter().enumerate() {
        let mut rng = seed.derive(k as u64).rng();
        let (classes, per_class, make): (&[Label], usize, Generator) = match *name {
            "HeadTail" => (&[1, 2], 10, head_tail),
            "CBF" => (&[1, 2, 3], 8, cbf),
            _ => (&[1, 2], 10, waves),
        };
        let train = build(name, Split::Train, per_class, classes, &mut rng, make)?;
        let test = build(name, Split::Test, per_class, classes, &mut rng, make)?;
        out.push((train, test));
    }
    Ok(out)
}
