//! Seeded fixtures for the criterion benches.

use dihedral_core::{Point, PointCloud, TimeSeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` points uniform in `[-2, 2]²`.
pub fn uniform_cloud(n: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PointCloud::new(
        (0..n)
            .map(|_| Point::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
            .collect(),
    )
    .expect("non-empty finite cloud")
}

/// Three-lobed periodic signal sampled `len` times over `cycles` periods.
pub fn lobed_series(len: usize, cycles: f64) -> TimeSeries {
    let samples = (0..len)
        .map(|i| {
            let t = std::f64::consts::TAU * cycles * i as f64 / len as f64;
            t.cos() + 0.6 * (4.0 * t).cos()
        })
        .collect();
    TimeSeries::new(samples).expect("finite samples")
}
