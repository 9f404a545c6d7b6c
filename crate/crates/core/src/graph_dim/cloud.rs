use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compact_set::CompactSet;
use crate::error::{Error, Result};
use crate::rb_fractal::GridFunction;
use crate::sv_map::{uniform_grid, SetValuedMap};

/// Default cap on plane-cloud sizes.
pub const DEFAULT_MAX_CLOUD_POINTS: usize = 1 << 24;

/// Points `(u, y)` with `y ∈ F(u)`, sampled on a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneCloud {
    points: Vec<(f64, f64)>,
    grid_n: usize,
    set_spacing: f64,
}

impl PlaneCloud {
    pub fn from_points(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("a plane cloud needs points".into()));
        }
        Ok(PlaneCloud {
            points,
            grid_n: 0,
            set_spacing: 0.0,
        })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    pub fn set_spacing(&self) -> f64 {
        self.set_spacing
    }
}

/// Points at most `spacing` apart covering `[lo, hi]`, both ends included.
fn fill(lo: f64, hi: f64, spacing: f64, out: &mut Vec<f64>) {
    let steps = ((hi - lo) / spacing - 1e-9).ceil().max(0.0) as usize;
    if steps == 0 {
        out.push(lo);
        if hi > lo {
            out.push(hi);
        }
        return;
    }
    let h = (hi - lo) / steps as f64;
    out.extend((0..steps).map(|k| lo + h * k as f64));
    out.push(hi);
}

/// The classical graph `{(u, y) : y ∈ F(u)}` sampled on `grid_n` values of
/// `u` and at spacing `set_spacing` inside every part of `F(u)`.
pub fn standard_graph_cloud(f: &SetValuedMap, grid_n: usize, set_spacing: f64) -> Result<PlaneCloud> {
    standard_graph_cloud_with(f, grid_n, set_spacing, DEFAULT_MAX_CLOUD_POINTS)
}

pub fn standard_graph_cloud_with(
    f: &SetValuedMap,
    grid_n: usize,
    set_spacing: f64,
    max_points: usize,
) -> Result<PlaneCloud> {
    if grid_n < 2 || !(set_spacing > 0.0) {
        return Err(Error::InvalidInput(
            "standard graph needs grid_n >= 2 and set_spacing > 0".into(),
        ));
    }
    let columns = uniform_grid(f.domain(), grid_n)
        .into_par_iter()
        .map(|u| {
            let set = f.evaluate(u)?;
            let mut ys = Vec::new();
            for part in set.parts() {
                fill(part.lo(), part.hi(), set_spacing, &mut ys);
                if ys.len() > max_points {
                    return Err(Error::CapacityExceeded(format!(
                        "graph column at u = {u} needs more than {max_points} points"
                    )));
                }
            }
            Ok((u, ys))
        })
        .collect::<Result<Vec<_>>>()?;
    let total: usize = columns.iter().map(|(_, ys)| ys.len()).sum();
    if total > max_points {
        return Err(Error::CapacityExceeded(format!(
            "graph cloud needs {total} points, cap is {max_points}"
        )));
    }
    let mut points = Vec::with_capacity(total);
    for (u, ys) in columns {
        points.extend(ys.into_iter().map(|y| (u, y)));
    }
    Ok(PlaneCloud {
        points,
        grid_n,
        set_spacing,
    })
}

/// Which metric a [`GraphCloud`] is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphMetric {
    /// `|u − w| + H_d(A, B)`.
    Graph,
    /// `|u − w| + H_d(A + F^α(w), B + F^α(u))`.
    Fractal,
}

/// Pairs `(u, A)` sorted by `u`. Clouds in the [`GraphMetric::Fractal`]
/// metric carry `F^α(u)` alongside every pair.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphCloud {
    points: Vec<(f64, CompactSet)>,
    anchors: Option<Vec<CompactSet>>,
}

impl GraphCloud {
    /// A cloud in the graph metric.
    pub fn new(mut points: Vec<(f64, CompactSet)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("a graph cloud needs points".into()));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(GraphCloud {
            points,
            anchors: None,
        })
    }

    /// A cloud in the fractal metric; `anchors[k]` is `F^α(u_k)`.
    pub fn with_anchors(points: Vec<(f64, CompactSet)>, anchors: Vec<CompactSet>) -> Result<Self> {
        if points.is_empty() || points.len() != anchors.len() {
            return Err(Error::InvalidInput(
                "anchored cloud needs one anchor per point".into(),
            ));
        }
        let mut rows: Vec<_> = points.into_iter().zip(anchors).collect();
        rows.sort_by(|a, b| a.0 .0.total_cmp(&b.0 .0));
        let (points, anchors) = rows.into_iter().unzip();
        Ok(GraphCloud {
            points,
            anchors: Some(anchors),
        })
    }

    /// The graph of a grid function in the fractal metric:
    /// `(u, F^α(u))` anchored at itself.
    pub fn from_grid(g: &GridFunction) -> Self {
        let points: Vec<_> = g.iter().map(|(u, v)| (u, v.clone())).collect();
        let anchors = g.values().to_vec();
        GraphCloud {
            points,
            anchors: Some(anchors),
        }
    }

    pub fn metric(&self) -> GraphMetric {
        if self.anchors.is_some() {
            GraphMetric::Fractal
        } else {
            GraphMetric::Graph
        }
    }

    pub fn points(&self) -> &[(f64, CompactSet)] {
        &self.points
    }

    pub fn anchors(&self) -> Option<&[CompactSet]> {
        self.anchors.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Distance between points `i` and `j` in the cloud's metric.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (u, a) = &self.points[i];
        let (w, b) = &self.points[j];
        match &self.anchors {
            None => dg_distance((*u, a), (*w, b)),
            Some(an) => frak_distance_with((*u, a), (*w, b), &an[i], &an[j]),
        }
    }

    /// CSV rows `(u, part_index, lo, hi)`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["u", "part_index", "lo", "hi"])?;
        for (u, set) in &self.points {
            for (k, p) in set.parts().iter().enumerate() {
                w.write_record([
                    format!("{u:?}"),
                    k.to_string(),
                    format!("{:?}", p.lo()),
                    format!("{:?}", p.hi()),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }
}

/// The graph `{(u_k, F(u_k))}` on a uniform grid.
pub fn new_graph_cloud(f: &SetValuedMap, grid_n: usize) -> Result<GraphCloud> {
    GraphCloud::new(f.sample(grid_n)?)
}

/// `|u − w| + H_d(A, B)`.
pub fn dg_distance(p: (f64, &CompactSet), q: (f64, &CompactSet)) -> f64 {
    (p.0 - q.0).abs() + p.1.hausdorff(q.1)
}

/// `|u − w| + H_d(A + F^α(w), B + F^α(u))` given `fa_u = F^α(u)` and
/// `fa_w = F^α(w)`.
pub fn frak_distance_with(
    p: (f64, &CompactSet),
    q: (f64, &CompactSet),
    fa_u: &CompactSet,
    fa_w: &CompactSet,
) -> f64 {
    (p.0 - q.0).abs() + p.1.minkowski_add(fa_w).hausdorff(&q.1.minkowski_add(fa_u))
}

/// [`frak_distance_with`] with `F^α` read off a grid function; both `u`
/// and `w` must be grid points and the sets convex.
pub fn frak_distance(
    p: (f64, &CompactSet),
    q: (f64, &CompactSet),
    fa: &GridFunction,
) -> Result<f64> {
    if !p.1.is_convex() || !q.1.is_convex() {
        return Err(Error::ConvexityRequired("frak_distance needs interval values".into()));
    }
    Ok(frak_distance_with(p, q, fa.value_at(p.0)?, fa.value_at(q.0)?))
}

/// Largest `H_d(F(u), F(w)) / |u − w|` over adjacent grid points.
pub fn lipschitz_estimate(f: &SetValuedMap, grid_n: usize) -> Result<f64> {
    let s = f.sample(grid_n)?;
    Ok(s.windows(2)
        .map(|w| w[0].1.hausdorff(&w[1].1) / (w[1].0 - w[0].0))
        .fold(0.0, f64::max))
}
