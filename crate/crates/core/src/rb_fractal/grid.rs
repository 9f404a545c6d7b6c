use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::compact_set::CompactSet;
use crate::error::{Error, Result};
use crate::sv_map::{pairwise_holder, path_variation};

use super::partition::{AffineMaps, Partition};
use super::system::{Endpoint, FractalSystem, DEFAULT_MAX_ITER};

/// Default cap on the number of grid points.
pub const DEFAULT_MAX_GRID_POINTS: usize = 1 << 22;

/// A grid point written as `L_{w_1} ∘ … ∘ L_{w_k}(u_i)`; maps and knots
/// are numbered from 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Address {
    pub word: Vec<u32>,
    pub knot: u32,
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.word.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, "@{}", self.knot)
    }
}

/// One node of the dense set in generation order.
#[derive(Debug, Clone, Copy)]
struct Node {
    u: f64,
    /// Index of the node this one is the image of, and the map used.
    parent: Option<(usize, usize)>,
    knot: usize,
}

/// The dense set `C_depth` in generation order: knots first, then the
/// images of interior points level by level.
struct DenseGrid {
    nodes: Vec<Node>,
    /// `levels[k]` is the node range created at level `k`.
    levels: Vec<std::ops::Range<usize>>,
}

/// `|C_depth| = N + (N − 2) Σ_{k=1..depth} (N − 1)^k`.
pub fn dense_set_size(knots: usize, depth: u32) -> Option<usize> {
    let branches = knots - 1;
    let mut total = knots;
    let mut level = knots - 2;
    for _ in 0..depth {
        level = level.checked_mul(branches)?;
        total = total.checked_add(level)?;
    }
    Some(total)
}

impl DenseGrid {
    fn build(partition: &Partition, maps: &AffineMaps, depth: u32, max_points: usize) -> Result<Self> {
        let n = partition.len();
        match dense_set_size(n, depth) {
            Some(size) if size <= max_points => {}
            _ => {
                return Err(Error::CapacityExceeded(format!(
                    "dense set of depth {depth} over {n} knots exceeds {max_points} points"
                )))
            }
        }
        let mut nodes: Vec<Node> = partition
            .points()
            .iter()
            .enumerate()
            .map(|(i, &u)| Node {
                u,
                parent: None,
                knot: i,
            })
            .collect();
        let mut levels = vec![0..n];
        // Images of u_1 and u_N are knots, so only interior knots seed new points.
        let mut frontier = 1..n - 1;
        for _ in 0..depth {
            let start = nodes.len();
            for p in frontier.clone() {
                let parent = nodes[p];
                for j in 0..maps.count() {
                    nodes.push(Node {
                        u: maps.apply(j, parent.u),
                        parent: Some((p, j)),
                        knot: parent.knot,
                    });
                }
            }
            frontier = start..nodes.len();
            levels.push(frontier.clone());
        }
        Ok(DenseGrid { nodes, levels })
    }

    fn address(&self, mut idx: usize) -> Address {
        let mut word = Vec::new();
        let knot = self.nodes[idx].knot as u32 + 1;
        while let Some((p, j)) = self.nodes[idx].parent {
            word.push(j as u32 + 1);
            idx = p;
        }
        Address { word, knot }
    }

    /// Permutation sorting the nodes by `u`.
    fn sorted_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by(|&a, &b| self.nodes[a].u.total_cmp(&self.nodes[b].u));
        order
    }
}

/// The sorted dense set `C_depth = ∪_{|w| ≤ depth} L_w(Δ)`.
pub fn dense_set(partition: &Partition, depth: u32) -> Result<Vec<f64>> {
    let maps = AffineMaps::new(partition);
    let grid = DenseGrid::build(partition, &maps, depth, DEFAULT_MAX_GRID_POINTS)?;
    let mut pts: Vec<f64> = grid.nodes.iter().map(|n| n.u).collect();
    pts.sort_by(f64::total_cmp);
    Ok(pts)
}

/// Set values on the sorted points of a dense set.
#[derive(Debug, Clone)]
pub struct GridFunction {
    depth: u32,
    points: Vec<f64>,
    values: Vec<CompactSet>,
    addresses: Vec<Address>,
    lookup_tol: f64,
}

impl GridFunction {
    fn from_sorted(
        depth: u32,
        points: Vec<f64>,
        values: Vec<CompactSet>,
        addresses: Vec<Address>,
    ) -> Self {
        let min_gap = points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        let span = points[points.len() - 1] - points[0];
        GridFunction {
            depth,
            lookup_tol: (1e-9 * span).min(0.25 * min_gap),
            points,
            values,
            addresses,
        }
    }

    /// `F` sampled on the dense set of `partition` at `depth`.
    pub fn sample(
        f: &crate::sv_map::SetValuedMap,
        partition: &Partition,
        depth: u32,
    ) -> Result<Self> {
        let maps = AffineMaps::new(partition);
        let grid = DenseGrid::build(partition, &maps, depth, DEFAULT_MAX_GRID_POINTS)?;
        let order = grid.sorted_order();
        let points: Vec<f64> = order.iter().map(|&i| grid.nodes[i].u).collect();
        let values = points
            .par_iter()
            .map(|&u| f.evaluate(u))
            .collect::<Result<Vec<_>>>()?;
        let addresses = order.iter().map(|&i| grid.address(i)).collect();
        Ok(Self::from_sorted(depth, points, values, addresses))
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn values(&self) -> &[CompactSet] {
        &self.values
    }

    pub fn addresses(&self) -> &[Address] {
        &self.addresses
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &CompactSet)> {
        self.points.iter().copied().zip(self.values.iter())
    }

    /// Index of the grid point matching `u` up to round-off.
    pub fn lookup(&self, u: f64) -> Option<usize> {
        let k = self.points.partition_point(|&p| p < u);
        [k.checked_sub(1), Some(k)]
            .into_iter()
            .flatten()
            .filter(|&i| i < self.points.len())
            .find(|&i| (self.points[i] - u).abs() <= self.lookup_tol)
    }

    pub fn value_at(&self, u: f64) -> Result<&CompactSet> {
        self.lookup(u)
            .map(|i| &self.values[i])
            .ok_or(Error::PointNotOnGrid { u })
    }

    /// Largest gap between consecutive grid points.
    pub fn max_gap(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// `max_k H_d(self(u_k), other(u_k))`; grids must coincide.
    pub fn sup_distance(&self, other: &GridFunction) -> Result<f64> {
        if self.points.len() != other.points.len() {
            return Err(Error::InvalidInput("grid functions live on different grids".into()));
        }
        Ok(self
            .values
            .par_iter()
            .zip(other.values.par_iter())
            .map(|(a, b)| a.hausdorff(b))
            .reduce(|| 0.0, f64::max))
    }

    /// `max_k H_d(self(u_k), F(u_k))`.
    pub fn sup_distance_to_map(&self, f: &crate::sv_map::SetValuedMap) -> Result<f64> {
        let d = self
            .points
            .par_iter()
            .zip(self.values.par_iter())
            .map(|(&u, a)| Ok(a.hausdorff(&f.evaluate(u)?)))
            .collect::<Result<Vec<f64>>>()?;
        Ok(d.into_iter().fold(0.0, f64::max))
    }

    /// Variation along the sorted grid.
    pub fn variation(&self) -> f64 {
        path_variation(&self.values)
    }

    /// Max over grid pairs of `H_d(G(u), G(w)) / |u − w|^σ`.
    pub fn holder_seminorm(&self, sigma: f64) -> f64 {
        pairwise_holder(&self.points, &self.values, sigma)
    }

    /// CSV rows `(address, u, part_index, lo, hi)`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["address", "u", "part_index", "lo", "hi"])?;
        for ((addr, u), set) in self.addresses.iter().zip(&self.points).zip(&self.values) {
            for (k, part) in set.parts().iter().enumerate() {
                w.write_record([
                    addr.to_string(),
                    format!("{u:?}"),
                    k.to_string(),
                    format!("{:?}", part.lo()),
                    format!("{:?}", part.hi()),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }
}

impl FractalSystem {
    /// `F^α` on the dense set of the given depth by forward recursion along
    /// addresses: endpoint fixed points, then the interior knots, then
    /// `F^α(L_j x) = F(L_j x) + α F^α(x) − α S(x)` level by level.
    pub fn evaluate_fractal(&self, depth: u32, tol: f64) -> Result<GridFunction> {
        self.evaluate_fractal_with(depth, tol, DEFAULT_MAX_GRID_POINTS)
    }

    pub fn evaluate_fractal_with(
        &self,
        depth: u32,
        tol: f64,
        max_points: usize,
    ) -> Result<GridFunction> {
        let knots = self.partition().points();
        let n = knots.len();
        let grid = DenseGrid::build(self.partition(), self.maps(), depth, max_points)?;
        let first = self.endpoint_fixed_point(Endpoint::First, tol, DEFAULT_MAX_ITER)?;
        let last = self.endpoint_fixed_point(Endpoint::Last, tol, DEFAULT_MAX_ITER)?;

        let mut values: Vec<Option<CompactSet>> = vec![None; grid.nodes.len()];
        values[0] = Some(first.clone());
        values[n - 1] = Some(last);
        for i in 1..n - 1 {
            values[i] = Some(self.rb_step(knots[i], &first, knots[0])?);
        }
        for level in grid.levels.iter().skip(1) {
            let computed = grid.nodes[level.clone()]
                .par_iter()
                .map(|node| {
                    let (p, _) = node.parent.expect("non-knot nodes have parents");
                    let parent_value = values[p].as_ref().expect("parents precede children");
                    self.rb_step(node.u, parent_value, grid.nodes[p].u)
                })
                .collect::<Result<Vec<_>>>()?;
            for (slot, v) in values[level.clone()].iter_mut().zip(computed) {
                *slot = Some(v);
            }
        }

        let order = grid.sorted_order();
        let points = order.iter().map(|&i| grid.nodes[i].u).collect();
        let addresses = order.iter().map(|&i| grid.address(i)).collect();
        let values = order
            .iter()
            .map(|&i| values[i].take().expect("every node evaluated"))
            .collect();
        Ok(GridFunction::from_sorted(depth, points, values, addresses))
    }

    /// Independent check of [`FractalSystem::evaluate_fractal`]: iterates the
    /// operator `(ΦG)(x) = F(x) + α G(L_n^{-1} x) − α S(L_n^{-1} x)` on the
    /// dense set, starting from `F`, with preimages found numerically.
    pub fn picard_oracle(&self, depth: u32, tol: f64, max_iter: usize) -> Result<PicardRun> {
        let mut g = GridFunction::sample(self.seed(), self.partition(), depth)?;
        let pre = g
            .points
            .iter()
            .map(|&x| {
                let n = self.partition().piece_of(x);
                let y = (x - self.maps().offsets()[n]) / self.maps().slopes()[n];
                g.lookup(y).ok_or(Error::PointNotOnGrid { u: y })
            })
            .collect::<Result<Vec<usize>>>()?;
        let f_vals = g.values.clone();
        let s_vals = g
            .points
            .par_iter()
            .map(|&u| Ok(self.base().evaluate(u)?.scale(-self.alpha())))
            .collect::<Result<Vec<_>>>()?;

        let alpha = self.alpha();
        let threshold = if alpha == 0.0 {
            0.0
        } else {
            tol * (1.0 - alpha.abs()) / alpha.abs()
        };
        let mut changes = Vec::new();
        for _ in 0..max_iter {
            let next: Vec<CompactSet> = (0..g.len())
                .into_par_iter()
                .map(|k| {
                    let y = pre[k];
                    f_vals[k].minkowski_add(&g.values[y].scale(alpha).minkowski_add(&s_vals[y]))
                })
                .collect();
            let change = next
                .par_iter()
                .zip(g.values.par_iter())
                .map(|(a, b)| a.hausdorff(b))
                .reduce(|| 0.0, f64::max);
            g.values = next;
            changes.push(change);
            if change <= threshold {
                return Ok(PicardRun {
                    grid: g,
                    iterations: changes.len(),
                    changes,
                });
            }
        }
        Err(Error::NoConvergence {
            iterations: max_iter,
            last_change: changes.last().copied().unwrap_or(f64::INFINITY),
        })
    }

    /// Max over grid points `x` and maps `j` with `L_j x` on the grid of
    /// `H_d(G(L_j x), F(L_j x) + α G(x) − α S(x))`.
    pub fn residual(&self, g: &GridFunction) -> Result<f64> {
        let maps = self.maps();
        let defects = (0..g.len())
            .into_par_iter()
            .map(|k| {
                let x = g.points[k];
                let mut worst = 0.0f64;
                for j in 0..maps.count() {
                    // grid points are images computed by `apply`, so true
                    // edges match bitwise; a tolerance would pair up
                    // distinct points clustered near a map's fixed point
                    let y = maps.apply(j, x);
                    let i = g.points.partition_point(|&p| p < y);
                    if g.points.get(i) == Some(&y) {
                        let rhs = self.rb_step(g.points[i], &g.values[k], x)?;
                        worst = worst.max(g.values[i].hausdorff(&rhs));
                    }
                }
                Ok(worst)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(defects.into_iter().fold(0.0, f64::max))
    }
}

/// Output of [`FractalSystem::picard_oracle`].
#[derive(Debug, Clone)]
pub struct PicardRun {
    pub grid: GridFunction,
    pub iterations: usize,
    /// Sup-distance between successive iterates.
    pub changes: Vec<f64>,
}
