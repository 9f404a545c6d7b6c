//! Fixed inputs shared by the benchmarks.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use svfractal_core::sample::random_set;
use svfractal_core::{BaseFunctionSpec, CompactSet, FractalSystem, Interval, Partition, Result, ScalarFn, SetValuedMap};

/// Pairs of random sets with up to `parts` intervals each.
pub fn set_pairs(seed: u64, count: usize, parts: usize) -> Vec<(CompactSet, CompactSet)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (random_set(&mut rng, parts, 10.0), random_set(&mut rng, parts, 10.0)))
        .collect()
}

/// Interval-valued map with oscillating envelopes on [0, 1].
pub fn wavy_map() -> Result<SetValuedMap> {
    let wave = ScalarFn::Sin {
        amplitude: 0.4,
        frequency: 5.0,
        phase: 0.0,
    };
    let hi = ScalarFn::Sum {
        terms: vec![wave.clone(), ScalarFn::poly([0.3, 0.0, 0.7])],
    };
    let lo = wave;
    SetValuedMap::envelope(Interval::new(0.0, 1.0), lo, hi)
}

/// Three-map system built on [`wavy_map`].
pub fn wavy_system(alpha: f64) -> Result<FractalSystem> {
    let f = wavy_map()?;
    let partition = Partition::new(vec![0.0, 0.35, 0.6, 1.0])?;
    let s = svfractal_core::rb_fractal::build_base(&f, &BaseFunctionSpec::identity_reparam(), 1e-9)?;
    FractalSystem::new(f, s, partition, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert_eq!(set_pairs(1, 3, 4).len(), 3);
        assert!(wavy_system(-0.6).is_ok());
    }
}
