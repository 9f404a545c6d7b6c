use crate::compact_set::CompactSet;
use crate::error::{Error, Result};
use crate::sv_map::{uniform_grid, SetValuedMap};

use super::base::check_compatibility;
use super::partition::{AffineMaps, Partition};

/// Default tolerance for the compatibility condition.
pub const DEFAULT_TOL_COMPAT: f64 = 1e-9;

/// Default iteration cap for fixed-point solvers.
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Grid used to estimate `sup ‖F^α − F‖` for the pointwise evaluator.
const BOUND_GRID: usize = 257;

/// Which end of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    First,
    Last,
}

/// Seed `F`, base `S`, partition, affine maps and scale `α`.
#[derive(Debug, Clone)]
pub struct FractalSystem {
    f: SetValuedMap,
    s: SetValuedMap,
    partition: Partition,
    maps: AffineMaps,
    alpha: f64,
    tol_compat: f64,
    /// Upper estimate of `sup_u H_d(F^α(u), F(u))`.
    deviation_bound: f64,
}

impl FractalSystem {
    pub fn new(f: SetValuedMap, s: SetValuedMap, partition: Partition, alpha: f64) -> Result<Self> {
        Self::with_tolerance(f, s, partition, alpha, DEFAULT_TOL_COMPAT)
    }

    pub fn with_tolerance(
        f: SetValuedMap,
        s: SetValuedMap,
        partition: Partition,
        alpha: f64,
        tol_compat: f64,
    ) -> Result<Self> {
        if !(alpha.abs() < 1.0) {
            return Err(Error::InvalidInput(format!("|alpha| must be < 1, got {alpha}")));
        }
        if f.domain() != s.domain() {
            return Err(Error::InvalidInput("F and S must share a domain".into()));
        }
        let dom = f.domain();
        let scale = 1e-12 * (1.0 + dom.lo().abs().max(dom.hi().abs()));
        if (partition.first() - dom.lo()).abs() > scale || (partition.last() - dom.hi()).abs() > scale
        {
            return Err(Error::InvalidInput(format!(
                "partition spans [{}, {}] but the maps live on [{}, {}]",
                partition.first(),
                partition.last(),
                dom.lo(),
                dom.hi()
            )));
        }
        let defect = check_compatibility(&f, &s)?;
        if defect > tol_compat {
            return Err(Error::IncompatibleBase {
                defect,
                tol: tol_compat,
            });
        }
        let maps = AffineMaps::new(&partition);
        let mut sys = FractalSystem {
            f,
            s,
            partition,
            maps,
            alpha,
            tol_compat,
            deviation_bound: 0.0,
        };
        sys.deviation_bound = sys.estimate_deviation_bound()?;
        Ok(sys)
    }

    pub fn seed(&self) -> &SetValuedMap {
        &self.f
    }

    pub fn base(&self) -> &SetValuedMap {
        &self.s
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn maps(&self) -> &AffineMaps {
        &self.maps
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn tol_compat(&self) -> f64 {
        self.tol_compat
    }

    /// `H_d(S(u_1) − F(u_1), S(u_N) − F(u_N))`.
    pub fn compatibility_defect(&self) -> Result<f64> {
        check_compatibility(&self.f, &self.s)
    }

    /// `F(x) + α A − α S(y)`: the right-hand side of the self-referential
    /// equation at `x = L_n(y)` given `A = F^α(y)`.
    pub(crate) fn rb_step(&self, x: f64, a: &CompactSet, y: f64) -> Result<CompactSet> {
        let tail = a
            .scale(self.alpha)
            .minkowski_add(&self.s.evaluate(y)?.scale(-self.alpha));
        Ok(self.f.evaluate(x)?.minkowski_add(&tail))
    }

    /// The fixed point of `A ↦ F(u*) + αA − αS(u*)` at an end `u*` of the
    /// domain, by Picard iteration from `F(u*)`. Stops once the step size
    /// guarantees an error of at most `tol`.
    pub fn endpoint_fixed_point(
        &self,
        which: Endpoint,
        tol: f64,
        max_iter: usize,
    ) -> Result<CompactSet> {
        let u = match which {
            Endpoint::First => self.partition.first(),
            Endpoint::Last => self.partition.last(),
        };
        let start = self.f.evaluate(u)?;
        if self.alpha == 0.0 {
            return Ok(start);
        }
        let threshold = tol * (1.0 - self.alpha.abs()) / self.alpha.abs();
        let mut current = start;
        let mut change = f64::INFINITY;
        for _ in 0..max_iter {
            let next = self.rb_step(u, &current, u)?;
            change = next.hausdorff(&current);
            current = next;
            if change <= threshold {
                return Ok(current);
            }
        }
        Err(Error::NoConvergence {
            iterations: max_iter,
            last_change: change,
        })
    }

    /// `F^α(u)` at an arbitrary point, by following the preimage chain
    /// `u → L_n^{-1}(u) → …` far enough that the truncation error,
    /// damped by `|α|` per step, falls below `tol`. The chain stops early
    /// when it reaches a knot within its accumulated round-off, where the
    /// value is known from the endpoint fixed points.
    pub fn evaluate_at(&self, u: f64, tol: f64) -> Result<CompactSet> {
        let dom = self.f.domain();
        if !(u >= dom.lo() && u <= dom.hi()) {
            self.f.evaluate(u)?;
        }
        let u = u.clamp(dom.lo(), dom.hi());
        if self.alpha == 0.0 || self.deviation_bound == 0.0 {
            return self.f.evaluate(u);
        }
        let a = self.alpha.abs();
        let steps = ((tol / self.deviation_bound).ln() / a.ln()).ceil().max(1.0) as usize;
        let knots = self.partition.points();
        let scale = dom.width().max(dom.lo().abs()).max(dom.hi().abs());
        let mut err = 4.0 * f64::EPSILON * scale;
        let mut chain = Vec::with_capacity(steps + 1);
        chain.push(u);
        let mut knot = None;
        for _ in 0..=steps {
            let x = *chain.last().unwrap();
            let k = knots.partition_point(|&p| p < x);
            let near = [k.checked_sub(1), Some(k)]
                .into_iter()
                .flatten()
                .filter(|&i| i < knots.len())
                .find(|&i| (knots[i] - x).abs() <= err);
            if let Some(i) = near {
                knot = Some(i);
                break;
            }
            if chain.len() > steps {
                break;
            }
            let n = self.partition.piece_of(x);
            chain.push(self.maps.invert(n, x));
            err = err / self.maps.slopes()[n] + 4.0 * f64::EPSILON * scale;
        }
        let last = chain.len() - 1;
        let mut value = match knot {
            Some(i) => self.knot_value(i, tol)?,
            None => self.f.evaluate(chain[last])?,
        };
        for k in (0..last).rev() {
            value = self.rb_step(chain[k], &value, chain[k + 1])?;
        }
        Ok(value)
    }

    /// `F^α(u_i) = F(u_i) + αF^α(u_1) − αS(u_1)`, with `F^α(u_N)` taken
    /// from its own fixed point.
    fn knot_value(&self, i: usize, tol: f64) -> Result<CompactSet> {
        let knots = self.partition.points();
        if i + 1 == knots.len() {
            return self.endpoint_fixed_point(Endpoint::Last, tol, DEFAULT_MAX_ITER);
        }
        let first = self.endpoint_fixed_point(Endpoint::First, tol, DEFAULT_MAX_ITER)?;
        if i == 0 {
            return Ok(first);
        }
        self.rb_step(knots[i], &first, knots[0])
    }

    /// `|α|/(1−|α|) (‖F−S‖ + 2‖F‖)` on a sample grid, padded: a bound on how
    /// far `F^α` strays from `F`, used only to size preimage chains.
    fn estimate_deviation_bound(&self) -> Result<f64> {
        if self.alpha == 0.0 {
            return Ok(0.0);
        }
        let mut fs = 0.0f64;
        let mut fnorm = 0.0f64;
        for u in uniform_grid(self.f.domain(), BOUND_GRID) {
            let fu = self.f.evaluate(u)?;
            fs = fs.max(fu.hausdorff(&self.s.evaluate(u)?));
            fnorm = fnorm.max(fu.norm());
        }
        let a = self.alpha.abs();
        Ok(2.0 * a / (1.0 - a) * (fs + 2.0 * fnorm) + 1e-3)
    }
}
