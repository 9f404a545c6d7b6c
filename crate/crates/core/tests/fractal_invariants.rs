use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use svfractal_core::rb_fractal::{perturbation_gap, AffineMaps, BaseFunctionSpec};
use svfractal_core::sample::{random_partition, random_system, SystemParams};
use svfractal_core::{CompactSet, FractalSystem, Interval, Partition, ScalarFn, SetValuedMap};

const TOL: f64 = 1e-9;

fn systems(seed: u64, n: usize) -> Vec<(FractalSystem, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = random_system(&mut rng, &SystemParams::default()).unwrap();
            (r.system, r.depth)
        })
        .collect()
}

#[test]
fn affine_maps_hit_the_knots() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for k in 3..8 {
        let p = random_partition(&mut rng, k);
        let maps = AffineMaps::new(&p);
        let pts = p.points();
        let total: f64 = maps.slopes().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        for n in 0..maps.count() {
            assert_eq!(maps.apply(n, p.first()), pts[n]);
            assert_eq!(maps.apply(n, p.last()), pts[n + 1]);
            assert!(maps.slopes()[n] > 0.0 && maps.slopes()[n] < 1.0);
        }
    }
}

#[test]
fn picard_changes_contract_at_rate_alpha() {
    for (sys, depth) in systems(2, 12) {
        let run = sys.picard_oracle(depth.min(4), TOL, 10_000).unwrap();
        let a = sys.alpha().abs();
        for w in run.changes.windows(2) {
            assert!(w[1] <= (a + 1e-10) * w[0] + 1e-15, "{} > {a} x {}", w[1], w[0]);
        }
    }
}

#[test]
fn recursion_agrees_with_picard() {
    for (sys, depth) in systems(3, 12) {
        let g = sys.evaluate_fractal(depth, TOL).unwrap();
        let p = sys.picard_oracle(depth, TOL, 100_000).unwrap();
        assert!(g.sup_distance(&p.grid).unwrap() <= 2.0 * TOL);
    }
}

#[test]
fn knot_values_follow_the_left_endpoint() {
    for (sys, depth) in systems(4, 12) {
        let g = sys.evaluate_fractal(depth, TOL).unwrap();
        let p1 = sys.partition().first();
        let a1 = g.value_at(p1).unwrap().clone();
        let shift = a1.minkowski_sub(&sys.base().evaluate(p1).unwrap()).scale(sys.alpha());
        for &u in sys.partition().points() {
            let want = sys.seed().evaluate(u).unwrap().minkowski_add(&shift);
            assert!(g.value_at(u).unwrap().hausdorff(&want) <= 2.0 * TOL);
        }
    }
}

#[test]
fn perturbation_bound_on_random_systems() {
    for (sys, depth) in systems(5, 20) {
        let g = sys.evaluate_fractal(depth, TOL).unwrap();
        let gap = perturbation_gap(&sys, &g).unwrap();
        assert!(gap.lhs <= gap.rhs + 4.0 * TOL, "{gap:?}");
    }
}

#[test]
fn pointwise_evaluation_matches_grid() {
    for (sys, _) in systems(6, 6) {
        let g = sys.evaluate_fractal(3, 1e-11).unwrap();
        for (u, v) in g.iter().step_by(7) {
            let at = sys.evaluate_at(u, 1e-8).unwrap();
            assert!(at.hausdorff(v) <= 1e-8, "u = {u}");
        }
    }
}

#[test]
fn singleton_seeds_are_interpolated() {
    let unit = Interval::new(0.0, 1.0);
    let f = SetValuedMap::singleton(unit, ScalarFn::Sin { amplitude: 1.0, frequency: 4.0, phase: 0.3 })
        .unwrap();
    let s = svfractal_core::rb_fractal::build_base(&f, &BaseFunctionSpec::identity_reparam(), TOL)
        .unwrap();
    let p = Partition::new(vec![0.0, 0.3, 0.55, 1.0]).unwrap();
    for alpha in [-0.9, -0.2, 0.4, 0.95] {
        let sys = FractalSystem::new(f.clone(), s.clone(), p.clone(), alpha).unwrap();
        let g = sys.evaluate_fractal(4, TOL).unwrap();
        for &u in p.points() {
            assert!(g.value_at(u).unwrap().hausdorff(&f.evaluate(u).unwrap()) <= 2.0 * TOL);
        }
    }
}

#[test]
fn rejects_bad_systems() {
    let unit = Interval::new(0.0, 1.0);
    let f = SetValuedMap::constant(unit, CompactSet::interval(0.0, 1.0).unwrap()).unwrap();
    let p = Partition::uniform(0.0, 1.0, 3).unwrap();
    assert!(FractalSystem::new(f.clone(), f.clone(), p.clone(), 1.0).is_err());
    let zero = SetValuedMap::singleton(unit, ScalarFn::identity()).unwrap();
    assert!(FractalSystem::new(f.clone(), zero, p, 0.5).is_err());
    let short = Partition::new(vec![0.0, 0.5, 0.9]).unwrap();
    assert!(FractalSystem::new(f.clone(), f, short, 0.5).is_err());
    assert!(Partition::new(vec![0.0, 1.0]).is_err());
    assert!(Partition::new(vec![0.0, 0.6, 0.5, 1.0]).is_err());
}

#[test]
fn depth_over_capacity_is_reported() {
    let f = SetValuedMap::constant(Interval::new(0.0, 1.0), CompactSet::interval(0.0, 1.0).unwrap())
        .unwrap();
    let p = Partition::uniform(0.0, 1.0, 6).unwrap();
    let sys = FractalSystem::new(f.clone(), f, p, 0.3).unwrap();
    assert!(matches!(
        sys.evaluate_fractal(20, TOL),
        Err(svfractal_core::Error::CapacityExceeded(_))
    ));
}
