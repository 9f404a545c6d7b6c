use svfractal_core::approx::{
    approximate_within, bernstein, bernstein_error, bernstein_weights, ApproxOptions,
};
use svfractal_core::rb_fractal::{perturbation_gap, BaseFunctionSpec};
use svfractal_core::{CompactSet, Interval, Partition, ScalarFn, SetValuedMap};

fn unit() -> Interval {
    Interval::new(0.0, 1.0)
}

fn families() -> Vec<SetValuedMap> {
    vec![
        SetValuedMap::constant(unit(), CompactSet::interval(-1.0, 1.0).unwrap()).unwrap(),
        SetValuedMap::envelope(unit(), ScalarFn::constant(0.0), ScalarFn::poly([0.0, 0.0, 1.0]))
            .unwrap(),
        SetValuedMap::singleton(unit(), ScalarFn::Abs { center: 0.5, scale: 1.0 }).unwrap(),
        SetValuedMap::envelope(
            unit(),
            ScalarFn::Sin { amplitude: 1.0, frequency: 6.0, phase: 0.0 },
            ScalarFn::Sum {
                terms: vec![
                    ScalarFn::Sin { amplitude: 1.0, frequency: 6.0, phase: 0.0 },
                    ScalarFn::Sqrt { scale: 1.0, shift: 0.0 },
                ],
            },
        )
        .unwrap(),
    ]
}

#[test]
fn weights_sum_to_one() {
    for n in 1..=60 {
        for k in 0..=50 {
            let t = k as f64 / 50.0;
            let s: f64 = bernstein_weights(n, t).iter().sum();
            assert!((s - 1.0).abs() <= 1e-12, "n={n} t={t}");
        }
    }
}

#[test]
fn polynomials_interpolate_the_ends() {
    for f in families() {
        for n in [1, 3, 17] {
            let p = bernstein(&f, n).unwrap();
            assert_eq!(p.eval(0.0), f.evaluate(0.0).unwrap());
            assert_eq!(p.eval(1.0), f.evaluate(1.0).unwrap());
        }
    }
}

#[test]
fn error_shrinks_with_degree() {
    for f in families() {
        let mut prev = f64::INFINITY;
        for n in [1, 2, 4, 8, 16, 32, 64] {
            let e = bernstein_error(&f, &bernstein(&f, n).unwrap(), 257).unwrap();
            assert!(e <= prev + 1e-10, "degree {n}: {e} > {prev}");
            prev = e;
        }
    }
}

#[test]
fn report_respects_the_error_chain() {
    let part = Partition::uniform(0.0, 1.0, 4).unwrap();
    for f in families() {
        let r = approximate_within(
            &f,
            0.08,
            &BaseFunctionSpec::identity_reparam(),
            &part,
            &ApproxOptions::default(),
        )
        .unwrap();
        assert!(r.success && r.achieved < 0.08 && r.alpha != 0.0);
        assert!(r.achieved <= r.bernstein_error + r.fractal_error + 1e-9);
        assert!(r.fractal_error <= r.perturbation_rhs + 4e-9);
    }
}

#[test]
fn fractal_error_is_bounded_by_perturbation() {
    let f = &families()[3];
    let p = bernstein(f, 12).unwrap();
    let base = BaseFunctionSpec::identity_reparam();
    let part = Partition::new(vec![0.0, 0.4, 1.0]).unwrap();
    let (sys, grid) =
        svfractal_core::approx::fractal_polynomial(&p, &part, &base, 0.3, 5, 1e-9).unwrap();
    let gap = perturbation_gap(&sys, &grid).unwrap();
    assert!(gap.lhs <= gap.rhs + 4e-9);
}

#[test]
fn non_convex_targets_are_rejected() {
    let f = SetValuedMap::new(
        unit(),
        svfractal_core::MapFamily::CantorValued { depth: 2, scale: None },
    )
    .unwrap();
    assert!(bernstein(&f, 4).is_err());
}
