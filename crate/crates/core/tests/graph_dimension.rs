use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use svfractal_core::graph_dim::{
    dg_distance, fit_dimension, frak_distance_with, moran_solve, net_cover_count, new_graph_cloud,
    BoxCountTable, GraphCloud, IfsSystem,
};
use svfractal_core::rb_fractal::{build_base, BaseFunctionSpec};
use svfractal_core::sample::random_set;
use svfractal_core::{CompactSet, FractalSystem, Interval, MapFamily, Partition, ScalarFn, SetValuedMap};

fn unit() -> Interval {
    Interval::new(0.0, 1.0)
}

fn wavy_system(alpha: f64) -> FractalSystem {
    let f = SetValuedMap::envelope(
        unit(),
        ScalarFn::Sin { amplitude: 0.4, frequency: 5.0, phase: 0.0 },
        ScalarFn::Sum {
            terms: vec![
                ScalarFn::Sin { amplitude: 0.4, frequency: 5.0, phase: 0.0 },
                ScalarFn::poly([0.3, 0.0, 0.7]),
            ],
        },
    )
    .unwrap();
    let s = build_base(&f, &BaseFunctionSpec::identity_reparam(), 1e-9).unwrap();
    let p = Partition::new(vec![0.0, 0.35, 0.6, 1.0]).unwrap();
    FractalSystem::new(f, s, p, alpha).unwrap()
}

fn net_slope(f: &SetValuedMap) -> f64 {
    let cloud = new_graph_cloud(f, 8193).unwrap();
    let mut t = BoxCountTable::new("net_cover");
    for j in 3..=8 {
        let eta = 0.5f64.powi(j);
        t.push(eta, net_cover_count(&cloud, eta));
    }
    fit_dimension(&t).unwrap().slope
}

#[test]
fn ifs_maps_contract_with_the_exact_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for alpha in [-0.7, 0.2, 0.6] {
        let ifs = IfsSystem::new(wavy_system(alpha), 1e-12).unwrap();
        let sys = ifs.system().clone();
        // dense-set points: there F^α is pinned down exactly by the knots
        let grid = svfractal_core::rb_fractal::dense_set(sys.partition(), 4).unwrap();
        for _ in 0..40 {
            let (u, w) = (
                grid[rng.gen_range(0..grid.len())],
                grid[rng.gen_range(0..grid.len())],
            );
            let (a, b) = (
                CompactSet::interval(-1.0, rng.gen_range(-1.0..2.0)).unwrap(),
                CompactSet::interval(rng.gen_range(-2.0..0.0), 1.0).unwrap(),
            );
            let (fu, fw) = (ifs.anchor(u).unwrap(), ifs.anchor(w).unwrap());
            let before = frak_distance_with((u, &a), (w, &b), &fu, &fw);
            for j in 0..ifs.map_count() {
                let p = ifs.w_apply(j, (u, &a)).unwrap();
                let q = ifs.w_apply(j, (w, &b)).unwrap();
                let after = frak_distance_with(
                    (p.0, &p.1),
                    (q.0, &q.1),
                    &ifs.anchor(p.0).unwrap(),
                    &ifs.anchor(q.0).unwrap(),
                );
                let aj = sys.maps().slopes()[j];
                let rate = aj.max(alpha.abs());
                assert!(after <= rate * before + 1e-10, "{after} > {rate} x {before}");
                let identity = aj * (u - w).abs()
                    + alpha.abs() * a.minkowski_add(&fw).hausdorff(&b.minkowski_add(&fu));
                assert!((after - identity).abs() <= 1e-10, "{after} vs {identity}");
            }
        }
    }
}

#[test]
fn attractor_sample_is_nearly_invariant() {
    let sys = wavy_system(0.45);
    let g = sys.evaluate_fractal(5, 1e-12).unwrap();
    let ifs = IfsSystem::new(sys, 1e-12).unwrap();
    let target = GraphCloud::from_grid(&g);
    let pts: Vec<_> = g.iter().map(|(u, v)| (u, v.clone())).collect();
    let next = ifs.hutchinson_step(&pts, 0.0, 1 << 20).unwrap();
    let moved = ifs.anchored(next).unwrap();
    let d = svfractal_core::graph_dim::cloud_distance(&moved, &target).unwrap();
    assert!(d <= 2e-12 + g.max_gap(), "{d}");
}

#[test]
fn lipschitz_maps_embed_bi_lipschitz() {
    // l = 2 for both endpoints
    let f = SetValuedMap::envelope(
        unit(),
        ScalarFn::Sin { amplitude: 0.5, frequency: 4.0, phase: 0.0 },
        ScalarFn::poly([1.0, 0.0, 0.9]),
    )
    .unwrap();
    let l = 2.0;
    let s = f.sample(257).unwrap();
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            let du = s[j].0 - s[i].0;
            let d = dg_distance((s[i].0, &s[i].1), (s[j].0, &s[j].1));
            assert!(du <= d && d <= (1.0 + l) * du);
        }
    }
}

#[test]
fn adding_a_lipschitz_map_keeps_dimension() {
    let f = ScalarFn::Sin { amplitude: 0.6, frequency: 7.0, phase: 0.2 };
    let l = 4.2;
    let tails = [
        MapFamily::constant(CompactSet::interval(-1.0, 1.0).unwrap()),
        MapFamily::envelope(ScalarFn::poly([0.0, 1.0]), ScalarFn::poly([1.0, 0.0, 1.0])),
    ];
    for t in tails {
        let tm = SetValuedMap::new(unit(), t.clone()).unwrap();
        let sum = SetValuedMap::new(unit(), MapFamily::translate(t, f.clone())).unwrap();
        let (ts, ss) = (tm.sample(129).unwrap(), sum.sample(129).unwrap());
        for i in 0..ts.len() {
            for j in i + 1..ts.len() {
                let before = dg_distance((ts[i].0, &ts[i].1), (ts[j].0, &ts[j].1));
                let after = dg_distance((ss[i].0, &ss[i].1), (ss[j].0, &ss[j].1));
                assert!(after <= (1.0 + l) * before);
            }
        }
        assert!((net_slope(&tm) - net_slope(&sum)).abs() <= 0.15);
    }
}

#[test]
fn multiplying_by_a_lipschitz_map_keeps_dimension() {
    // F(u) = [1, 2 + u], l = 1, sup‖F‖ = 3
    let fm = MapFamily::envelope(ScalarFn::constant(1.0), ScalarFn::poly([2.0, 1.0]));
    let t = MapFamily::envelope(ScalarFn::poly([0.0, -0.5]), ScalarFn::poly([0.5, 0.0, 0.5]));
    let tm = SetValuedMap::new(unit(), t.clone()).unwrap();
    let prod = SetValuedMap::new(unit(), MapFamily::product(fm, t)).unwrap();
    let (ts, ps) = (tm.sample(129).unwrap(), prod.sample(129).unwrap());
    let t_norm = ts.iter().map(|p| p.1.norm()).fold(0.0, f64::max);
    let m = (1.0 + 1.0 * t_norm).max(3.0);
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            let before = dg_distance((ts[i].0, &ts[i].1), (ts[j].0, &ts[j].1));
            let after = dg_distance((ps[i].0, &ps[i].1), (ps[j].0, &ps[j].1));
            assert!(after <= m * before + 1e-12);
        }
    }
    assert!(net_slope(&prod) <= net_slope(&tm) + 0.1);
}

#[test]
fn graph_distances_are_metrics() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let fa = CompactSet::interval(0.0, 0.5).unwrap();
    let fb = CompactSet::interval(-0.2, 1.0).unwrap();
    let fc = CompactSet::interval(0.3, 0.4).unwrap();
    for _ in 0..500 {
        let p: Vec<(f64, CompactSet)> = (0..3)
            .map(|_| (rng.gen_range(0.0..1.0), random_set(&mut rng, 3, 2.0)))
            .collect();
        let d = |i: usize, j: usize| dg_distance((p[i].0, &p[i].1), (p[j].0, &p[j].1));
        assert_eq!(d(0, 1), d(1, 0));
        assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-10);
        let q: Vec<(f64, CompactSet, &CompactSet)> = [&fa, &fb, &fc]
            .into_iter()
            .map(|anchor| {
                let lo = rng.gen_range(-1.0..1.0);
                (rng.gen_range(0.0..1.0), CompactSet::interval(lo, lo + rng.gen_range(0.0..1.0)).unwrap(), anchor)
            })
            .collect();
        let e = |i: usize, j: usize| frak_distance_with((q[i].0, &q[i].1), (q[j].0, &q[j].1), q[i].2, q[j].2);
        assert!((e(0, 1) - e(1, 0)).abs() <= 1e-12);
        assert!(e(0, 2) <= e(0, 1) + e(1, 2) + 1e-10);
        assert!(e(0, 0) <= 1e-12);
    }
}

proptest! {
    #[test]
    fn moran_root_solves_the_equation(ratios in prop::collection::vec(0.01..0.99f64, 2..6)) {
        let t = moran_solve(&ratios).unwrap();
        let s: f64 = ratios.iter().map(|r| r.powf(t)).sum();
        prop_assert!((s - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn moran_root_grows_with_ratios(
        ratios in prop::collection::vec(0.01..0.9f64, 2..6),
        k in 0usize..6,
        bump in 0.01..0.09f64,
    ) {
        let t = moran_solve(&ratios).unwrap();
        let mut bigger = ratios.clone();
        let i = k % bigger.len();
        bigger[i] += bump;
        prop_assert!(moran_solve(&bigger).unwrap() > t);
    }
}
