//! Set-valued maps `I → 𝒦(ℝ)` and grid estimators of the function-space
//! metrics on them.
//!
//! Every estimator samples a uniform grid and reports a [`MetricReport`]
//! flagged `is_lower_bound`: the true quantities are suprema over points,
//! pairs or partitions, and a finite grid can only under-estimate them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::bernstein_weights;
use crate::compact_set::{CompactSet, Interval};
use crate::error::{Error, Result};
use crate::scalar::ScalarFn;

/// Points checked when validating envelope ordering at construction.
const VALIDATION_GRID: usize = 257;

/// Relative slack for domain membership, absorbing affine round-off.
const DOMAIN_SLACK: f64 = 1e-12;

/// Descriptor of a set-valued map family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MapFamily {
    /// `u ↦ set`.
    Constant { set: CompactSet },
    /// `u ↦ [lo(u), hi(u)]`.
    Envelope { lo: ScalarFn, hi: ScalarFn },
    /// `u ↦ {f(u)}`.
    Singleton { f: ScalarFn },
    /// `u ↦ scale(u) · C_depth` with `C_depth` the pre-Cantor set.
    CantorValued {
        depth: u32,
        #[serde(default)]
        scale: Option<ScalarFn>,
    },
    /// Pointwise Minkowski sum.
    Sum {
        left: Box<MapFamily>,
        right: Box<MapFamily>,
    },
    /// `u ↦ factor(u) · F(u)`.
    Scaled {
        factor: ScalarFn,
        map: Box<MapFamily>,
    },
    /// Pointwise set product `F(u)G(u)`.
    Product {
        left: Box<MapFamily>,
        right: Box<MapFamily>,
    },
    /// `u ↦ F(u) + shift(u)`.
    Translate {
        map: Box<MapFamily>,
        shift: ScalarFn,
    },
    /// `u ↦ F(t(u))`.
    Reparam { map: Box<MapFamily>, t: ScalarFn },
    /// Endpoint-wise Bernstein polynomial on `[lo, hi]` with interval
    /// coefficients `coeffs[k]` attached to the node `k/n`.
    Bernstein {
        lo: f64,
        hi: f64,
        coeffs: Vec<Interval>,
    },
}

impl MapFamily {
    pub fn constant(set: CompactSet) -> Self {
        MapFamily::Constant { set }
    }

    pub fn envelope(lo: ScalarFn, hi: ScalarFn) -> Self {
        MapFamily::Envelope { lo, hi }
    }

    pub fn singleton(f: ScalarFn) -> Self {
        MapFamily::Singleton { f }
    }

    pub fn sum(left: MapFamily, right: MapFamily) -> Self {
        MapFamily::Sum {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn scaled(factor: ScalarFn, map: MapFamily) -> Self {
        MapFamily::Scaled {
            factor,
            map: Box::new(map),
        }
    }

    pub fn product(left: MapFamily, right: MapFamily) -> Self {
        MapFamily::Product {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn translate(map: MapFamily, shift: ScalarFn) -> Self {
        MapFamily::Translate {
            map: Box::new(map),
            shift,
        }
    }

    pub fn reparam(map: MapFamily, t: ScalarFn) -> Self {
        MapFamily::Reparam {
            map: Box::new(map),
            t,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            MapFamily::Constant { .. } => "constant",
            MapFamily::Envelope { .. } => "envelope",
            MapFamily::Singleton { .. } => "singleton",
            MapFamily::CantorValued { .. } => "cantor_valued",
            MapFamily::Sum { .. } => "sum",
            MapFamily::Scaled { .. } => "scaled",
            MapFamily::Product { .. } => "product",
            MapFamily::Translate { .. } => "translate",
            MapFamily::Reparam { .. } => "reparam",
            MapFamily::Bernstein { .. } => "bernstein",
        }
    }

    /// Whether every value of the family is a single interval.
    pub fn is_convex_valued(&self) -> bool {
        match self {
            MapFamily::Constant { set } => set.is_convex(),
            MapFamily::Envelope { .. } | MapFamily::Singleton { .. } => true,
            MapFamily::Bernstein { .. } => true,
            MapFamily::CantorValued { depth, scale } => {
                *depth == 0 || matches!(scale, Some(ScalarFn::Const { value }) if *value == 0.0)
            }
            MapFamily::Sum { left, right } | MapFamily::Product { left, right } => {
                left.is_convex_valued() && right.is_convex_valued()
            }
            MapFamily::Scaled { map, .. }
            | MapFamily::Translate { map, .. }
            | MapFamily::Reparam { map, .. } => map.is_convex_valued(),
        }
    }

    pub fn eval(&self, u: f64) -> Result<CompactSet> {
        match self {
            MapFamily::Constant { set } => Ok(set.clone()),
            MapFamily::Envelope { lo, hi } => {
                let (a, b) = (lo.eval(u), hi.eval(u));
                if a <= b {
                    CompactSet::interval(a, b)
                } else if a - b <= 1e-12 * (1.0 + a.abs()) {
                    Ok(CompactSet::singleton(0.5 * (a + b)))
                } else {
                    Err(Error::InvalidInput(format!(
                        "envelope has lo > hi at u = {u} ({a} > {b})"
                    )))
                }
            }
            MapFamily::Singleton { f } => {
                let v = f.eval(u);
                if v.is_finite() {
                    Ok(CompactSet::singleton(v))
                } else {
                    Err(Error::InvalidInput(format!("non-finite value at u = {u}")))
                }
            }
            MapFamily::CantorValued { depth, scale } => {
                let c = CompactSet::cantor(*depth)?;
                Ok(match scale {
                    Some(s) => c.scale(s.eval(u)),
                    None => c,
                })
            }
            MapFamily::Sum { left, right } => Ok(&left.eval(u)? + &right.eval(u)?),
            MapFamily::Scaled { factor, map } => Ok(map.eval(u)?.scale(factor.eval(u))),
            MapFamily::Product { left, right } => Ok(&left.eval(u)? * &right.eval(u)?),
            MapFamily::Translate { map, shift } => Ok(map.eval(u)?.translate(shift.eval(u))),
            MapFamily::Reparam { map, t } => map.eval(t.eval(u)),
            MapFamily::Bernstein { lo, hi, coeffs } => {
                if coeffs.is_empty() {
                    return Err(Error::InvalidInput("bernstein needs coefficients".into()));
                }
                let t = ((u - lo) / (hi - lo)).clamp(0.0, 1.0);
                let w = bernstein_weights(coeffs.len() - 1, t);
                let a: f64 = w.iter().zip(coeffs).map(|(w, c)| w * c.lo()).sum();
                let b: f64 = w.iter().zip(coeffs).map(|(w, c)| w * c.hi()).sum();
                CompactSet::interval(a, b.max(a))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let check = |f: &ScalarFn| f.validate().map_err(Error::InvalidInput);
        match self {
            MapFamily::Constant { .. } => Ok(()),
            MapFamily::Envelope { lo, hi } => {
                check(lo)?;
                check(hi)
            }
            MapFamily::Singleton { f } => check(f),
            MapFamily::CantorValued { depth, scale } => {
                CompactSet::cantor(*depth)?;
                scale.as_ref().map_or(Ok(()), check)
            }
            MapFamily::Sum { left, right } | MapFamily::Product { left, right } => {
                left.validate()?;
                right.validate()
            }
            MapFamily::Scaled { factor: f, map }
            | MapFamily::Translate { map, shift: f }
            | MapFamily::Reparam { map, t: f } => {
                check(f)?;
                map.validate()
            }
            MapFamily::Bernstein { lo, hi, coeffs } => {
                if coeffs.is_empty() || lo >= hi {
                    return Err(Error::InvalidInput(
                        "bernstein needs coefficients and lo < hi".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// A set-valued map on the closed interval `domain`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapSpec", into = "MapSpec")]
pub struct SetValuedMap {
    domain: Interval,
    family: MapFamily,
    convex: bool,
}

/// Serialized form of a [`SetValuedMap`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapSpec {
    pub domain: Interval,
    #[serde(flatten)]
    pub family: MapFamily,
}

impl TryFrom<MapSpec> for SetValuedMap {
    type Error = Error;

    fn try_from(spec: MapSpec) -> Result<Self> {
        SetValuedMap::new(spec.domain, spec.family)
    }
}

impl From<SetValuedMap> for MapSpec {
    fn from(m: SetValuedMap) -> Self {
        MapSpec {
            domain: m.domain,
            family: m.family,
        }
    }
}

impl SetValuedMap {
    /// Validates the descriptor and samples it on a grid, so envelope
    /// ordering violations surface here rather than mid-construction.
    pub fn new(domain: Interval, family: MapFamily) -> Result<Self> {
        if domain.width() <= 0.0 {
            return Err(Error::InvalidInput("map domain must have positive length".into()));
        }
        family.validate()?;
        for u in uniform_grid(domain, VALIDATION_GRID) {
            family.eval(u)?;
        }
        let convex = family.is_convex_valued();
        Ok(SetValuedMap {
            domain,
            family,
            convex,
        })
    }

    pub fn constant(domain: Interval, set: CompactSet) -> Result<Self> {
        Self::new(domain, MapFamily::constant(set))
    }

    pub fn envelope(domain: Interval, lo: ScalarFn, hi: ScalarFn) -> Result<Self> {
        Self::new(domain, MapFamily::envelope(lo, hi))
    }

    pub fn singleton(domain: Interval, f: ScalarFn) -> Result<Self> {
        Self::new(domain, MapFamily::singleton(f))
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn family(&self) -> &MapFamily {
        &self.family
    }

    pub fn is_convex_valued(&self) -> bool {
        self.convex
    }

    pub fn family_tag(&self) -> &'static str {
        self.family.tag()
    }

    /// `F(u)`; `u` must lie in the domain.
    pub fn evaluate(&self, u: f64) -> Result<CompactSet> {
        let slack = DOMAIN_SLACK * (1.0 + self.domain.lo().abs().max(self.domain.hi().abs()));
        if !(u >= self.domain.lo() - slack && u <= self.domain.hi() + slack) {
            return Err(Error::Domain {
                u,
                lo: self.domain.lo(),
                hi: self.domain.hi(),
            });
        }
        self.family.eval(u.clamp(self.domain.lo(), self.domain.hi()))
    }

    /// `(u_k, F(u_k))` on a uniform grid of `grid_n` points.
    pub fn sample(&self, grid_n: usize) -> Result<Vec<(f64, CompactSet)>> {
        check_grid(grid_n)?;
        uniform_grid(self.domain, grid_n)
            .into_par_iter()
            .map(|u| Ok((u, self.evaluate(u)?)))
            .collect()
    }

    fn require_convex(&self, what: &str) -> Result<()> {
        if self.convex {
            Ok(())
        } else {
            Err(Error::ConvexityRequired(format!(
                "{what}: `{}` map is not convex-valued",
                self.family_tag()
            )))
        }
    }
}

/// A grid estimate of a supremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub value: f64,
    pub grid_resolution: usize,
    pub is_lower_bound: bool,
}

impl MetricReport {
    fn lower_bound(value: f64, grid_resolution: usize) -> Self {
        MetricReport {
            value,
            grid_resolution,
            is_lower_bound: true,
        }
    }
}

/// `grid_n` equally spaced points from `lo` to `hi`, endpoints exact.
pub fn uniform_grid(domain: Interval, grid_n: usize) -> Vec<f64> {
    if grid_n == 1 {
        return vec![domain.lo()];
    }
    let (lo, hi) = (domain.lo(), domain.hi());
    let step = (hi - lo) / (grid_n - 1) as f64;
    (0..grid_n)
        .map(|k| if k + 1 == grid_n { hi } else { lo + step * k as f64 })
        .collect()
}

fn check_grid(grid_n: usize) -> Result<()> {
    if grid_n < 2 {
        Err(Error::InvalidInput(format!("grid_n must be >= 2, got {grid_n}")))
    } else {
        Ok(())
    }
}

fn check_same_domain(f: &SetValuedMap, g: &SetValuedMap) -> Result<()> {
    if f.domain != g.domain {
        Err(Error::InvalidInput(format!(
            "maps have different domains [{}, {}] and [{}, {}]",
            f.domain.lo(),
            f.domain.hi(),
            g.domain.lo(),
            g.domain.hi()
        )))
    } else {
        Ok(())
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("Hölder exponent must be in (0, 1], got {sigma}")))
    }
}

fn sample_pair(
    f: &SetValuedMap,
    g: &SetValuedMap,
    grid_n: usize,
) -> Result<(Vec<f64>, Vec<CompactSet>, Vec<CompactSet>)> {
    check_grid(grid_n)?;
    check_same_domain(f, g)?;
    let grid = uniform_grid(f.domain, grid_n);
    let fv = grid.par_iter().map(|&u| f.evaluate(u)).collect::<Result<Vec<_>>>()?;
    let gv = grid.par_iter().map(|&u| g.evaluate(u)).collect::<Result<Vec<_>>>()?;
    Ok((grid, fv, gv))
}

fn max_hausdorff(a: &[CompactSet], b: &[CompactSet]) -> f64 {
    a.par_iter()
        .zip(b)
        .map(|(x, y)| x.hausdorff(y))
        .reduce(|| 0.0, f64::max)
}

/// `sup_u H_d(F(u), G(u))` on the grid.
pub fn sup_distance(f: &SetValuedMap, g: &SetValuedMap, grid_n: usize) -> Result<MetricReport> {
    let (_, fv, gv) = sample_pair(f, g, grid_n)?;
    Ok(MetricReport::lower_bound(max_hausdorff(&fv, &gv), grid_n))
}

/// Max over grid pairs `u != w` of
/// `H_d(G(u) + H(w), H(u) + G(w)) / |u - w|^σ`.
fn cross_pair_term(grid: &[f64], g: &[CompactSet], h: &[CompactSet], sigma: f64) -> f64 {
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let mut best = 0.0f64;
            for j in (i + 1)..grid.len() {
                let d = (&g[i] + &h[j]).hausdorff(&(&h[i] + &g[j]));
                best = best.max(d / (grid[j] - grid[i]).abs().powf(sigma));
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

/// Grid estimate of the Hölder-space metric
/// `sup_u H_d(G, H) + sup_{u≠w} H_d(G(u)+H(w), H(u)+G(w)) / |u−w|^σ`.
pub fn holder_metric(
    g: &SetValuedMap,
    h: &SetValuedMap,
    sigma: f64,
    grid_n: usize,
) -> Result<MetricReport> {
    check_sigma(sigma)?;
    g.require_convex("holder_metric")?;
    h.require_convex("holder_metric")?;
    let (grid, gv, hv) = sample_pair(g, h, grid_n)?;
    let value = max_hausdorff(&gv, &hv) + cross_pair_term(&grid, &gv, &hv, sigma);
    Ok(MetricReport::lower_bound(value, grid_n))
}

/// `Σ_k H_d(F(t_k), F(t_{k−1}))` over the uniform partition.
pub fn variation(f: &SetValuedMap, grid_n: usize) -> Result<MetricReport> {
    let values: Vec<CompactSet> = f.sample(grid_n)?.into_iter().map(|(_, s)| s).collect();
    Ok(MetricReport::lower_bound(path_variation(&values), grid_n))
}

pub(crate) fn path_variation(values: &[CompactSet]) -> f64 {
    values.windows(2).map(|w| w[1].hausdorff(&w[0])).sum()
}

/// Grid estimate of the bounded-variation metric
/// `‖G − H‖_∞ + sup_P Σ H_d(G(y_i) + H(y_{i−1}), H(y_i) + G(y_{i−1}))`.
pub fn bv_metric(g: &SetValuedMap, h: &SetValuedMap, grid_n: usize) -> Result<MetricReport> {
    g.require_convex("bv_metric")?;
    h.require_convex("bv_metric")?;
    let (_, gv, hv) = sample_pair(g, h, grid_n)?;
    let sum: f64 = (1..gv.len())
        .map(|i| (&gv[i] + &hv[i - 1]).hausdorff(&(&hv[i] + &gv[i - 1])))
        .sum();
    Ok(MetricReport::lower_bound(max_hausdorff(&gv, &hv) + sum, grid_n))
}

/// Max over grid pairs of `H_d(F(u), F(w)) / |u − w|^σ`.
pub fn holder_seminorm(f: &SetValuedMap, sigma: f64, grid_n: usize) -> Result<MetricReport> {
    check_sigma(sigma)?;
    let samples = f.sample(grid_n)?;
    let (grid, values): (Vec<f64>, Vec<CompactSet>) = samples.into_iter().unzip();
    Ok(MetricReport::lower_bound(
        pairwise_holder(&grid, &values, sigma),
        grid_n,
    ))
}

pub(crate) fn pairwise_holder(grid: &[f64], values: &[CompactSet], sigma: f64) -> f64 {
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let mut best = 0.0f64;
            for j in (i + 1)..grid.len() {
                let d = values[i].hausdorff(&values[j]);
                best = best.max(d / (grid[j] - grid[i]).abs().powf(sigma));
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

/// Whether `F(u_k) ⊆ G(u_k)` (up to `slack`) at every grid point.
pub fn is_below(f: &SetValuedMap, g: &SetValuedMap, grid_n: usize, slack: f64) -> Result<bool> {
    let (_, fv, gv) = sample_pair(f, g, grid_n)?;
    Ok(fv.iter().zip(&gv).all(|(a, b)| a.is_subset_of(b, slack)))
}

/// First grid point where `F(u) ⊄ G(u)`, if any.
pub(crate) fn first_order_violation(
    f: &SetValuedMap,
    g: &SetValuedMap,
    grid: &[f64],
    slack: f64,
) -> Result<Option<f64>> {
    for &u in grid {
        if !f.evaluate(u)?.is_subset_of(&g.evaluate(u)?, slack) {
            return Ok(Some(u));
        }
    }
    Ok(None)
}
