//! Graphs of set-valued maps and their dimensions: plane clouds of the
//! classical graph, clouds of pairs `(u, F(u))` in the graph and fractal
//! metrics, covering counts and regressions, the graph IFS of a fractal
//! system, and Moran bounds.

mod cloud;
mod counting;
mod ifs;
mod moran;

pub use cloud::{
    dg_distance, frak_distance, frak_distance_with, lipschitz_estimate, new_graph_cloud,
    standard_graph_cloud, standard_graph_cloud_with, GraphCloud, GraphMetric, PlaneCloud,
    DEFAULT_MAX_CLOUD_POINTS,
};
pub use counting::{
    fit_dimension, grid_box_count, net_cover_count, range_sum_bounds, BoxCountTable,
    DimensionEstimate, RangeSumBounds,
};
pub use ifs::{cloud_distance, dim_bounds, IfsSystem, IfsTrace, MoranBounds, DEFAULT_MAX_IFS_POINTS};
pub use moran::moran_solve;
