use std::collections::HashSet;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sv_map::SetValuedMap;

use super::cloud::{GraphCloud, PlaneCloud};

/// Points closer than this (in cell units) to a mesh line count as lying
/// on it.
const BOUNDARY_EPS: f64 = 1e-9;

/// Samples per column for the maximum range, besides the column ends.
const RANGE_SAMPLES: usize = 16;

/// Size of a greedy net: scan the points by `u`, start a ball of radius
/// `η/2` at every point not yet covered.
pub fn net_cover_count(cloud: &GraphCloud, eta: f64) -> usize {
    let radius = 0.5 * eta;
    let pts = cloud.points();
    let mut covered = vec![false; pts.len()];
    let mut count = 0;
    for i in 0..pts.len() {
        if covered[i] {
            continue;
        }
        count += 1;
        covered[i] = true;
        // both metrics dominate |u − w|, so only a window of u matters
        let u = pts[i].0;
        let start = pts.partition_point(|p| p.0 < u - radius);
        for j in start..pts.len() {
            if pts[j].0 > u + radius {
                break;
            }
            if !covered[j] && cloud.distance(i, j) <= radius {
                covered[j] = true;
            }
        }
    }
    count
}

/// Candidate cell indices along one axis: one cell for interior points,
/// both neighbours for points on a mesh line.
fn axis_cells(x: f64, origin: f64, eta: f64, cells: i64) -> (i64, Option<i64>) {
    let t = (x - origin) / eta;
    let r = t.round();
    if (t - r).abs() <= BOUNDARY_EPS {
        let r = r as i64;
        let below = (r - 1).clamp(0, cells - 1);
        let above = r.clamp(0, cells - 1);
        if below == above {
            (above, None)
        } else {
            (below, Some(above))
        }
    } else {
        ((t.floor() as i64).clamp(0, cells - 1), None)
    }
}

/// Number of closed cells of the `η`-mesh anchored at the cloud's lower
/// left corner that meet the cloud.
///
/// Points on mesh lines belong to several closed cells; they are credited
/// to a neighbouring cell that is already occupied when possible, so a
/// point on a shared edge never inflates the count.
pub fn grid_box_count(cloud: &PlaneCloud, eta: f64) -> usize {
    let pts = cloud.points();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let cells = |extent: f64| ((extent / eta - BOUNDARY_EPS).ceil() as i64).max(1);
    let (mx, my) = (cells(x1 - x0), cells(y1 - y0));

    let candidates: Vec<((i64, Option<i64>), (i64, Option<i64>))> = pts
        .par_iter()
        .map(|&(x, y)| (axis_cells(x, x0, eta, mx), axis_cells(y, y0, eta, my)))
        .collect();
    let mut occupied: HashSet<(i64, i64)> = candidates
        .iter()
        .filter(|(a, b)| a.1.is_none() && b.1.is_none())
        .map(|(a, b)| (a.0, b.0))
        .collect();
    for &(a, b) in candidates.iter().filter(|(a, b)| a.1.is_some() || b.1.is_some()) {
        let xs = [Some(a.0), a.1];
        let ys = [Some(b.0), b.1];
        let mut options = xs
            .iter()
            .flatten()
            .flat_map(|&i| ys.iter().flatten().map(move |&j| (i, j)));
        if !options.clone().any(|c| occupied.contains(&c)) {
            occupied.insert(options.next().expect("at least one candidate"));
        }
    }
    occupied.len()
}

/// `(1/η) Σ R_F[W_i] ≤ N_η ≤ 2m + (1/η) Σ R_F[W_i]` for the columns
/// `W_i = [lo + iη, lo + (i+1)η]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RangeSumBounds {
    pub lower: f64,
    pub upper: f64,
    pub columns: usize,
    /// Estimated maximum range of `F` over each column.
    pub ranges: Vec<f64>,
}

/// Estimates the maximum range `R_F[W] = max(∪ F(x)) − min(∪ F(x))` over
/// each column from the column ends plus interior samples, then the two
/// box-count bounds.
pub fn range_sum_bounds(f: &SetValuedMap, eta: f64) -> Result<RangeSumBounds> {
    let dom = f.domain();
    if !(eta > 0.0 && eta < dom.width()) {
        return Err(Error::InvalidInput(format!(
            "eta must lie in (0, {}), got {eta}",
            dom.width()
        )));
    }
    let m = ((dom.width() / eta - BOUNDARY_EPS).ceil() as usize).max(1);
    let ranges = (0..m)
        .into_par_iter()
        .map(|i| {
            let a = dom.lo() + i as f64 * eta;
            let b = (dom.lo() + (i + 1) as f64 * eta).min(dom.hi());
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for k in 0..RANGE_SAMPLES + 2 {
                let x = a + (b - a) * k as f64 / (RANGE_SAMPLES + 1) as f64;
                let v = f.evaluate(x)?;
                lo = lo.min(v.lo());
                hi = hi.max(v.hi());
            }
            Ok(hi - lo)
        })
        .collect::<Result<Vec<f64>>>()?;
    let lower = ranges.iter().sum::<f64>() / eta;
    Ok(RangeSumBounds {
        lower,
        upper: 2.0 * m as f64 + lower,
        columns: m,
        ranges,
    })
}

/// `(η, N_η)` rows from one counting method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCountTable {
    pub method: String,
    pub rows: Vec<(f64, usize)>,
}

impl BoxCountTable {
    pub fn new(method: impl Into<String>) -> Self {
        BoxCountTable {
            method: method.into(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, eta: f64, count: usize) {
        self.rows.push((eta, count));
    }

    /// CSV rows `(eta, count, method_tag)`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["eta", "count", "method_tag"])?;
        for (eta, n) in &self.rows {
            w.write_record([format!("{eta:?}"), n.to_string(), self.method.clone()])?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }
}

/// Least-squares fit of `log N_η` against `−log η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub eta_min: f64,
    pub eta_max: f64,
}

impl DimensionEstimate {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["slope", "intercept", "r_squared", "eta_min", "eta_max"])?;
        w.write_record([
            format!("{:?}", self.slope),
            format!("{:?}", self.intercept),
            format!("{:?}", self.r_squared),
            format!("{:?}", self.eta_min),
            format!("{:?}", self.eta_max),
        ])?;
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }
}

/// Fits the box-counting slope. Logarithms are taken base 2, which leaves
/// the slope unchanged and keeps dyadic schedules exact.
pub fn fit_dimension(table: &BoxCountTable) -> Result<DimensionEstimate> {
    if table.rows.len() < 4 {
        return Err(Error::DegenerateFit(format!(
            "need at least 4 rows, got {}",
            table.rows.len()
        )));
    }
    if table.rows.iter().any(|&(eta, n)| !(eta > 0.0) || n == 0) {
        return Err(Error::DegenerateFit("eta and counts must be positive".into()));
    }
    let first = table.rows[0].1;
    if table.rows.iter().all(|&(_, n)| n == first) {
        return Err(Error::DegenerateFit("all counts are equal".into()));
    }
    let xs: Vec<f64> = table.rows.iter().map(|&(eta, _)| -eta.log2()).collect();
    let ys: Vec<f64> = table.rows.iter().map(|&(_, n)| (n as f64).log2()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all eta values are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r_squared = (1.0 - ss_res / syy).clamp(0.0, 1.0);
    let etas = table.rows.iter().map(|r| r.0);
    Ok(DimensionEstimate {
        slope,
        intercept,
        r_squared,
        eta_min: etas.clone().fold(f64::INFINITY, f64::min),
        eta_max: etas.fold(0.0, f64::max),
    })
}
