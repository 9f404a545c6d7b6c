use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sv_map::SetValuedMap;

use super::grid::GridFunction;
use super::partition::Partition;
use super::system::FractalSystem;

/// Both sides of `‖F^α − F‖ ≤ |α|/(1−|α|) ‖F − S‖ + 2|α|/(1−|α|) ‖F‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbationGap {
    pub lhs: f64,
    pub rhs: f64,
}

/// Evaluates both sides of the perturbation bound on the points of `g`.
pub fn perturbation_gap(sys: &FractalSystem, g: &GridFunction) -> Result<PerturbationGap> {
    let rows = g
        .points()
        .par_iter()
        .zip(g.values().par_iter())
        .map(|(&u, fa)| {
            let f = sys.seed().evaluate(u)?;
            let s = sys.base().evaluate(u)?;
            Ok((fa.hausdorff(&f), f.hausdorff(&s), f.norm()))
        })
        .collect::<Result<Vec<_>>>()?;
    let (lhs, fs, fnorm) = rows.into_iter().fold((0.0f64, 0.0f64, 0.0f64), |acc, r| {
        (acc.0.max(r.0), acc.1.max(r.1), acc.2.max(r.2))
    });
    let a = sys.alpha().abs();
    let rhs = a / (1.0 - a) * fs + 2.0 * a / (1.0 - a) * fnorm;
    Ok(PerturbationGap { lhs, rhs })
}

/// Grid distances `‖F − G‖` and `‖F^α − G^α‖` for two seeds sharing the
/// partition, base and scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorGap {
    pub input_dist: f64,
    pub output_dist: f64,
}

pub fn fractal_operator_gap(
    f: &SetValuedMap,
    g: &SetValuedMap,
    partition: &Partition,
    s: &SetValuedMap,
    alpha: f64,
    depth: u32,
    tol: f64,
) -> Result<OperatorGap> {
    let fs = FractalSystem::new(f.clone(), s.clone(), partition.clone(), alpha)?;
    let gs = FractalSystem::new(g.clone(), s.clone(), partition.clone(), alpha)?;
    let fa = fs.evaluate_fractal(depth, tol)?;
    let ga = gs.evaluate_fractal(depth, tol)?;
    let input_dist = fa
        .points()
        .par_iter()
        .map(|&u| Ok(f.evaluate(u)?.hausdorff(&g.evaluate(u)?)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(OperatorGap {
        input_dist,
        output_dist: fa.sup_distance(&ga)?,
    })
}

/// Builds `F^α` and `G^α` with the interpolatory bases `S_F = F`,
/// `S_G = G` and reports whether `F^α(u) ⊆ G^α(u)` (up to `slack`) on
/// every point of the dense set.
pub fn constrained_check(
    f: &SetValuedMap,
    g: &SetValuedMap,
    partition: &Partition,
    alpha: f64,
    depth: u32,
    slack: f64,
    tol: f64,
) -> Result<bool> {
    for (name, map) in [("F", f), ("G", g)] {
        for u in [partition.first(), partition.last()] {
            if !map.evaluate(u)?.is_singleton() {
                return Err(Error::EndpointNotSingleton(format!("{name}({u}) is not a point")));
            }
        }
    }
    let grid = GridFunction::sample(f, partition, depth)?;
    if let Some(u) = crate::sv_map::first_order_violation(f, g, grid.points(), slack)? {
        return Err(Error::OrderViolated { u });
    }
    let fa = FractalSystem::new(f.clone(), f.clone(), partition.clone(), alpha)?
        .evaluate_fractal(depth, tol)?;
    let ga = FractalSystem::new(g.clone(), g.clone(), partition.clone(), alpha)?
        .evaluate_fractal(depth, tol)?;
    Ok(fa
        .values()
        .iter()
        .zip(ga.values())
        .all(|(a, b)| a.is_subset_of(b, slack)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compact_set::{CompactSet, Interval};
    use crate::scalar::ScalarFn;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0)
    }

    fn halves() -> Partition {
        Partition::new(vec![0.0, 0.5, 1.0]).unwrap()
    }

    fn constant(lo: f64, hi: f64) -> SetValuedMap {
        SetValuedMap::constant(unit(), CompactSet::interval(lo, hi).unwrap()).unwrap()
    }

    #[test]
    fn perturbation_examples() {
        let f = constant(0.0, 1.0);
        let sys = FractalSystem::new(f.clone(), f.clone(), halves(), 0.5).unwrap();
        let g = sys.evaluate_fractal(4, 1e-9).unwrap();
        let gap = perturbation_gap(&sys, &g).unwrap();
        assert!((gap.lhs - 1.0).abs() <= 1e-9);
        assert!((gap.rhs - 2.0).abs() <= 1e-12);

        let sys = FractalSystem::new(f.clone(), f, halves(), 0.0).unwrap();
        let g = sys.evaluate_fractal(4, 1e-9).unwrap();
        assert_eq!(perturbation_gap(&sys, &g).unwrap(), PerturbationGap { lhs: 0.0, rhs: 0.0 });

        let single = SetValuedMap::singleton(unit(), ScalarFn::poly([0.0, 2.0, -2.0])).unwrap();
        let sys = FractalSystem::new(single.clone(), single, halves(), 0.7).unwrap();
        let g = sys.evaluate_fractal(4, 1e-9).unwrap();
        let gap = perturbation_gap(&sys, &g).unwrap();
        assert!(gap.lhs <= 1e-9);
        assert!(gap.lhs <= gap.rhs);
    }

    #[test]
    fn operator_gap_examples() {
        let f = constant(0.0, 1.0);
        let g = constant(0.0, 1.1);
        let r = fractal_operator_gap(&f, &g, &halves(), &f, 0.5, 4, 1e-9).unwrap();
        assert!((r.input_dist - 0.1).abs() < 1e-12);
        assert!(r.output_dist <= 0.2 + 4e-9);

        let r = fractal_operator_gap(&f, &f, &halves(), &f, 0.5, 4, 1e-9).unwrap();
        assert_eq!(r.input_dist, 0.0);
        assert!(r.output_dist <= 2e-9);

        let r = fractal_operator_gap(&f, &g, &halves(), &f, 0.0, 4, 1e-9).unwrap();
        assert_eq!(r.output_dist, r.input_dist);
    }

    #[test]
    fn constrained_examples() {
        let zero = SetValuedMap::singleton(unit(), ScalarFn::constant(0.0)).unwrap();
        let bump = ScalarFn::poly([0.0, 1.0, -1.0]);
        let neg = ScalarFn::poly([0.0, -1.0, 1.0]);
        let g = SetValuedMap::envelope(unit(), neg, bump).unwrap();
        assert!(constrained_check(&zero, &g, &halves(), 0.4, 5, 1e-8, 1e-9).unwrap());
        assert!(constrained_check(&g, &g, &halves(), 0.4, 4, 1e-8, 1e-9).unwrap());
        assert!(matches!(
            constrained_check(&g, &zero, &halves(), 0.4, 3, 1e-8, 1e-9),
            Err(Error::OrderViolated { .. })
        ));
        let wide = constant(-1.0, 1.0);
        assert!(matches!(
            constrained_check(&wide, &wide, &halves(), 0.4, 3, 1e-8, 1e-9),
            Err(Error::EndpointNotSingleton(_))
        ));
    }
}
