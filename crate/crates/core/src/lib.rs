//! Set-valued fractal functions on the real line.
//!
//! Compact sets are finite unions of closed intervals ([`CompactSet`]),
//! set-valued maps are serializable descriptors ([`SetValuedMap`]), and
//! the fractal machinery builds `F^α` on dense address grids
//! ([`FractalSystem`], [`GridFunction`]). The [`approx`] module constructs
//! fractal polynomials within a target distance and [`graph_dim`]
//! estimates dimensions of set-valued graphs.

pub mod approx;
pub mod compact_set;
pub mod error;
pub mod graph_dim;
pub mod rb_fractal;
pub mod sample;
pub mod scalar;
pub mod sv_map;

pub use compact_set::{CompactSet, Interval, SetConfig};
pub use error::{Error, Result};
pub use rb_fractal::{BaseFunctionSpec, FractalSystem, GridFunction, Partition};
pub use scalar::ScalarFn;
pub use sv_map::{MapFamily, MetricReport, SetValuedMap};
