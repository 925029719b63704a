//! Seeded synthetic datasets for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::series::TimeSeries;

/// `groups × per_group` noisy sine waves. Group `g` has its own frequency
/// and offset; every series gets a random phase shift, amplitude jitter and
/// uniform noise in `[-noise, noise]`. Series are interleaved by group.
pub fn shape_groups(groups: usize, per_group: usize, len: usize, noise: f64, seed: u64) -> Vec<TimeSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(groups * per_group);
    for i in 0..per_group {
        for g in 0..groups {
            let freq = 1.0 + g as f64;
            let offset = 3.0 * g as f64;
            let shift = rng.random_range(-0.3..0.3);
            let amp = rng.random_range(0.9..1.1);
            let samples = (0..len)
                .map(|t| {
                    let phase = std::f64::consts::TAU * freq * (t as f64 / len as f64) + shift;
                    offset + amp * phase.sin() + rng.random_range(-noise..=noise)
                })
                .collect();
            out.push(TimeSeries::new(format!("g{g}_{i}"), samples).expect("finite samples"));
        }
    }
    out
}

/// Random walks whose steps are uniform in `[-1, 1)`.
pub fn random_walks(p: usize, len: usize, seed: u64) -> Vec<TimeSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..p)
        .map(|i| {
            let mut x = 0.0;
            let samples = (0..len)
                .map(|_| {
                    x += rng.random_range(-1.0..1.0);
                    x
                })
                .collect();
            TimeSeries::new(format!("w{i}"), samples).expect("finite samples")
        })
        .collect()
}
