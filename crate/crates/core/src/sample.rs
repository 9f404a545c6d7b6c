//! Seeded generators of random sets, maps and fractal systems, shared by
//! the property suites and the command-line `check` runner.

use rand::Rng;

use crate::compact_set::{CompactSet, Interval};
use crate::error::Result;
use crate::rb_fractal::{build_base, BaseFunctionSpec, FractalSystem, Partition};
use crate::scalar::ScalarFn;
use crate::sv_map::{MapFamily, SetValuedMap};

/// A random canonical set with up to `max_parts` parts inside `[-span, span]`.
pub fn random_set<R: Rng + ?Sized>(rng: &mut R, max_parts: usize, span: f64) -> CompactSet {
    let k = rng.gen_range(1..=max_parts.max(1));
    let raw = (0..k)
        .map(|_| {
            let a = rng.gen_range(-span..span);
            let w = if rng.gen_bool(0.2) {
                0.0
            } else {
                rng.gen_range(0.0..span / 2.0)
            };
            Interval::new(a, a + w)
        })
        .collect();
    CompactSet::from_intervals(raw).expect("nonempty input")
}

/// A random single interval inside `[-span, span]`.
pub fn random_interval<R: Rng + ?Sized>(rng: &mut R, span: f64) -> CompactSet {
    let a = rng.gen_range(-span..span);
    let b = rng.gen_range(-span..span);
    CompactSet::interval(a.min(b), a.max(b)).expect("ordered ends")
}

fn random_poly<R: Rng + ?Sized>(rng: &mut R, degree: usize, scale: f64) -> ScalarFn {
    ScalarFn::poly((0..=degree).map(|_| rng.gen_range(-scale..scale)).collect::<Vec<_>>())
}

/// A random convex-valued map `u ↦ [p(u), p(u) + w_0 + w_2 u²]` with
/// cubic `p`.
pub fn random_convex_map<R: Rng + ?Sized>(rng: &mut R, domain: Interval) -> SetValuedMap {
    let lo = random_poly(rng, 3, 1.0);
    let width = ScalarFn::poly([rng.gen_range(0.0..1.0), 0.0, rng.gen_range(0.0..0.5)]);
    let hi = ScalarFn::Sum {
        terms: vec![lo.clone(), width],
    };
    SetValuedMap::new(domain, MapFamily::envelope(lo, hi)).expect("ordered envelope")
}

/// A random singleton-valued map `u ↦ {p(u)}` with cubic `p`.
pub fn random_singleton_map<R: Rng + ?Sized>(rng: &mut R, domain: Interval) -> SetValuedMap {
    SetValuedMap::singleton(domain, random_poly(rng, 3, 1.0)).expect("finite polynomial")
}

/// `N` knots on `[0, 1]` with random interior points kept apart.
pub fn random_partition<R: Rng + ?Sized>(rng: &mut R, knots: usize) -> Partition {
    loop {
        let mut pts: Vec<f64> = (0..knots - 2).map(|_| rng.gen_range(0.05..0.95)).collect();
        pts.push(0.0);
        pts.push(1.0);
        pts.sort_by(f64::total_cmp);
        if pts.windows(2).all(|w| w[1] - w[0] > 0.05) {
            return Partition::new(pts).expect("increasing knots");
        }
    }
}

/// A random base: the reparametrized form with `t(u) = u + c u(1 − u)`
/// or the multiplied form with `t(u) = 1 + c u(1 − u)`.
pub fn random_base_spec<R: Rng + ?Sized>(rng: &mut R) -> BaseFunctionSpec {
    let c = rng.gen_range(-0.5..0.5);
    if rng.gen_bool(0.5) {
        BaseFunctionSpec::TypeI {
            t: ScalarFn::poly([0.0, 1.0 + c, -c]),
        }
    } else {
        BaseFunctionSpec::TypeII {
            t: ScalarFn::poly([1.0, c, -c]),
        }
    }
}

/// Ranges for [`random_system`].
#[derive(Debug, Clone, Copy)]
pub struct SystemParams {
    pub knots: (usize, usize),
    pub max_alpha: f64,
    pub depth: (u32, u32),
    /// Probability of a singleton-valued seed.
    pub singleton_prob: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            knots: (3, 5),
            max_alpha: 0.8,
            depth: (3, 6),
            singleton_prob: 0.25,
        }
    }
}

/// A random system on `[0, 1]` with its evaluation depth.
#[derive(Debug, Clone)]
pub struct RandomSystem {
    pub system: FractalSystem,
    pub depth: u32,
}

pub fn random_system<R: Rng + ?Sized>(rng: &mut R, params: &SystemParams) -> Result<RandomSystem> {
    let domain = Interval::new(0.0, 1.0);
    let f = if rng.gen_bool(params.singleton_prob) {
        random_singleton_map(rng, domain)
    } else {
        random_convex_map(rng, domain)
    };
    let s = build_base(&f, &random_base_spec(rng), crate::rb_fractal::DEFAULT_TOL_COMPAT)?;
    let n = rng.gen_range(params.knots.0..=params.knots.1);
    let alpha = rng.gen_range(-params.max_alpha..=params.max_alpha);
    let system = FractalSystem::new(f, s, random_partition(rng, n), alpha)?;
    let depth = rng.gen_range(params.depth.0..=params.depth.1);
    Ok(RandomSystem { system, depth })
}

/// `G = F + [0, h] + {c u(1 − u)}`: a second seed compatible with every
/// base that is compatible with `F`.
pub fn compatible_perturbation<R: Rng + ?Sized>(rng: &mut R, f: &SetValuedMap) -> SetValuedMap {
    let h = rng.gen_range(0.0..0.5);
    let c = rng.gen_range(-1.0..1.0);
    let (u1, un) = (f.domain().lo(), f.domain().hi());
    // c (u − u_1)(u_N − u) vanishes at both ends
    let bump = ScalarFn::poly([-c * u1 * un, c * (u1 + un), -c]);
    let family = MapFamily::translate(
        MapFamily::sum(
            f.family().clone(),
            MapFamily::constant(CompactSet::interval(0.0, h).expect("h >= 0")),
        ),
        bump,
    );
    SetValuedMap::new(f.domain(), family).expect("valid perturbation")
}
