use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compact_set::CompactSet;
use crate::error::{Error, Result};
use crate::rb_fractal::FractalSystem;

use super::cloud::{frak_distance_with, GraphCloud};
use super::moran::moran_solve;

/// Default cap on Hutchinson cloud sizes.
pub const DEFAULT_MAX_IFS_POINTS: usize = 1 << 20;

/// The maps `W_j(u, A) = (L_j u, αA + F(L_j u) − αS(u))` of a fractal
/// system, acting on `I × 𝒦_c(ℝ)`.
#[derive(Debug, Clone)]
pub struct IfsSystem {
    sys: FractalSystem,
    /// Accuracy of pointwise `F^α` values used by the fractal metric.
    tol: f64,
}

impl IfsSystem {
    pub fn new(sys: FractalSystem, tol: f64) -> Result<Self> {
        if !sys.seed().is_convex_valued() || !sys.base().is_convex_valued() {
            return Err(Error::ConvexityRequired(
                "the graph IFS needs convex-valued F and S".into(),
            ));
        }
        Ok(IfsSystem { sys, tol })
    }

    pub fn system(&self) -> &FractalSystem {
        &self.sys
    }

    pub fn map_count(&self) -> usize {
        self.sys.maps().count()
    }

    /// Largest Lipschitz factor `max_j max{a_j, |α|}` in the fractal metric.
    pub fn contraction_ratio(&self) -> f64 {
        self.sys.maps().max_slope().max(self.sys.alpha().abs())
    }

    /// `W_j(u, A)`, with `j` counted from 0.
    pub fn w_apply(&self, j: usize, p: (f64, &CompactSet)) -> Result<(f64, CompactSet)> {
        let x = self.sys.maps().apply(j, p.0);
        Ok((x, self.sys.rb_step(x, p.1, p.0)?))
    }

    /// `F^α(u)` to the system's accuracy.
    pub fn anchor(&self, u: f64) -> Result<CompactSet> {
        self.sys.evaluate_at(u, self.tol)
    }

    /// Attaches `F^α(u)` to every pair, giving a cloud in the fractal metric.
    pub fn anchored(&self, points: Vec<(f64, CompactSet)>) -> Result<GraphCloud> {
        let anchors = points
            .par_iter()
            .map(|(u, _)| self.anchor(*u))
            .collect::<Result<Vec<_>>>()?;
        GraphCloud::with_anchors(points, anchors)
    }

    /// One Hutchinson step `∪_j W_j(cloud)`, keeping per `u`-cell of width
    /// `delta` the pair closest to the cell centre.
    pub fn hutchinson_step(
        &self,
        cloud: &[(f64, CompactSet)],
        delta: f64,
        max_points: usize,
    ) -> Result<Vec<(f64, CompactSet)>> {
        let m = self.map_count();
        if cloud.len().saturating_mul(m) > max_points {
            return Err(Error::CapacityExceeded(format!(
                "Hutchinson step would produce {} pairs, cap is {max_points}",
                cloud.len() * m
            )));
        }
        let images = (0..cloud.len() * m)
            .into_par_iter()
            .map(|k| {
                let (u, a) = &cloud[k / m];
                self.w_apply(k % m, (*u, a))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(prune(images, self.sys.partition().first(), delta))
    }

    /// Runs `steps` Hutchinson steps from `init`.
    pub fn ifs_iterate(
        &self,
        init: &[(f64, CompactSet)],
        steps: usize,
        delta: f64,
    ) -> Result<Vec<(f64, CompactSet)>> {
        let mut cloud = init.to_vec();
        for _ in 0..steps {
            cloud = self.hutchinson_step(&cloud, delta, DEFAULT_MAX_IFS_POINTS)?;
        }
        Ok(cloud)
    }

    /// Hutchinson iteration with the fractal-metric Hausdorff distance to
    /// `target` recorded after every step.
    pub fn trace(
        &self,
        init: &[(f64, CompactSet)],
        steps: usize,
        delta: f64,
        target: &GraphCloud,
    ) -> Result<IfsTrace> {
        if steps == 0 {
            return Err(Error::InvalidInput("steps must be >= 1".into()));
        }
        let mut cloud = init.to_vec();
        let initial = cloud_distance(&self.anchored(cloud.clone())?, target)?;
        let mut distances = Vec::with_capacity(steps);
        let mut sizes = Vec::with_capacity(steps);
        for _ in 0..steps {
            cloud = self.hutchinson_step(&cloud, delta, DEFAULT_MAX_IFS_POINTS)?;
            distances.push(cloud_distance(&self.anchored(cloud.clone())?, target)?);
            sizes.push(cloud.len());
        }
        Ok(IfsTrace {
            initial_distance: initial,
            distances,
            sizes,
            final_cloud: self.anchored(cloud)?,
        })
    }

    /// Moran bracket from the ratios `min{a_j, |α|}` and `max{a_j, |α|}`.
    pub fn dim_bounds(&self) -> Result<MoranBounds> {
        dim_bounds(&self.sys)
    }
}

fn prune(mut pts: Vec<(f64, CompactSet)>, origin: f64, delta: f64) -> Vec<(f64, CompactSet)> {
    if !(delta > 0.0) {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        return pts;
    }
    let key = |u: f64| {
        let t = (u - origin) / delta;
        let cell = t.floor();
        (cell as i64, ((t - cell) - 0.5).abs())
    };
    pts.sort_by(|a, b| {
        let (ca, da) = key(a.0);
        let (cb, db) = key(b.0);
        ca.cmp(&cb)
            .then(da.total_cmp(&db))
            .then(a.0.total_cmp(&b.0))
    });
    let mut out: Vec<(f64, CompactSet)> = Vec::new();
    let mut last_cell = None;
    for p in pts {
        let c = key(p.0).0;
        if last_cell != Some(c) {
            last_cell = Some(c);
            out.push(p);
        }
    }
    out
}

/// Record of [`IfsSystem::trace`].
#[derive(Debug, Clone)]
pub struct IfsTrace {
    pub initial_distance: f64,
    /// Distance to the target after each step.
    pub distances: Vec<f64>,
    pub sizes: Vec<usize>,
    pub final_cloud: GraphCloud,
}

/// `sup_{p ∈ a} min_{q ∈ b} 𝔡(p, q)`; both clouds need anchors.
fn directed(a: &GraphCloud, b: &GraphCloud) -> Result<f64> {
    let (aa, ba) = match (a.anchors(), b.anchors()) {
        (Some(x), Some(y)) => (x, y),
        _ => {
            return Err(Error::InvalidInput(
                "fractal-metric distance needs anchored clouds".into(),
            ))
        }
    };
    let bp = b.points();
    Ok((0..a.len())
        .into_par_iter()
        .map(|i| {
            let (u, set) = &a.points()[i];
            let d = |j: usize| frak_distance_with((*u, set), (bp[j].0, &bp[j].1), &aa[i], &ba[j]);
            let k = bp.partition_point(|q| q.0 < *u);
            let mut best = f64::INFINITY;
            // scan outwards; the metric dominates |u − w|
            for j in k..bp.len() {
                if bp[j].0 - u >= best {
                    break;
                }
                best = best.min(d(j));
            }
            for j in (0..k).rev() {
                if u - bp[j].0 >= best {
                    break;
                }
                best = best.min(d(j));
            }
            best
        })
        .reduce(|| 0.0, f64::max))
}

/// Hausdorff distance between two anchored clouds in the fractal metric.
pub fn cloud_distance(a: &GraphCloud, b: &GraphCloud) -> Result<f64> {
    Ok(directed(a, b)?.max(directed(b, a)?))
}

/// Lower and upper Moran ratios and their similarity dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoranBounds {
    pub r: Vec<f64>,
    #[serde(rename = "R")]
    pub big_r: Vec<f64>,
    pub t_lower: f64,
    pub t_upper: f64,
}

/// `r_j = min{a_j, |α|}`, `R_j = max{a_j, |α|}` and the solutions of
/// `Σ r_j^t = 1`, `Σ R_j^t = 1`. Zero ratios (`α = 0`) contribute nothing.
pub fn dim_bounds(sys: &FractalSystem) -> Result<MoranBounds> {
    let a = sys.alpha().abs();
    let slopes = sys.maps().slopes();
    let r: Vec<f64> = slopes.iter().map(|&s| s.min(a)).filter(|&x| x > 0.0).collect();
    let big_r: Vec<f64> = slopes.iter().map(|&s| s.max(a)).collect();
    let t_lower = if r.is_empty() { 0.0 } else { moran_solve(&r)? };
    let t_upper = moran_solve(&big_r)?;
    Ok(MoranBounds {
        r,
        big_r,
        t_lower,
        t_upper,
    })
}
