//! Set-valued α-fractal functions: the fixed point `F^α` of
//! `(ΦG)(L_n u) = F(L_n u) + α [G(u) − S(u)]` on a knot partition.
//!
//! Values are tabulated on the dense set of images of the knots under
//! compositions of the affine maps, where the self-referential equation
//! can be evaluated exactly by forward recursion along addresses.

mod analysis;
mod base;
mod grid;
mod partition;
mod system;

pub use analysis::{
    constrained_check, fractal_operator_gap, perturbation_gap, OperatorGap, PerturbationGap,
};
pub use base::{build_base, check_compatibility, BaseFunctionSpec};
pub use grid::{dense_set, dense_set_size, Address, GridFunction, PicardRun, DEFAULT_MAX_GRID_POINTS};
pub use partition::{AffineMaps, Partition};
pub use system::{Endpoint, FractalSystem, DEFAULT_MAX_ITER, DEFAULT_TOL_COMPAT};
