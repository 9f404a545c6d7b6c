use thiserror::Error;

/// Errors raised by the set algebra, the fractal constructions and the
/// dimension estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a compact set needs at least one interval")]
    EmptySet,

    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),

    #[error("point {u} lies outside the domain [{lo}, {hi}]")]
    Domain { u: f64, lo: f64, hi: f64 },

    #[error("operation requires convex (single-interval) values: {0}")]
    ConvexityRequired(String),

    #[error("base function is incompatible: H_d(S(u_1)-F(u_1), S(u_N)-F(u_N)) = {defect:e} exceeds {tol:e}")]
    IncompatibleBase { defect: f64, tol: f64 },

    #[error("no convergence after {iterations} iterations (last change {last_change:e})")]
    NoConvergence { iterations: usize, last_change: f64 },

    #[error("endpoint values must be singletons: {0}")]
    EndpointNotSingleton(String),

    #[error("order F <= G violated at u = {u}")]
    OrderViolated { u: f64 },

    #[error("point {u} is not on the evaluation grid")]
    PointNotOnGrid { u: f64 },

    #[error("Bernstein degree cap {cap} reached (best grid error {best:e}, target {target:e})")]
    DegreeCapExceeded { cap: usize, best: f64, target: f64 },

    #[error("degenerate dimension fit: {0}")]
    DegenerateFit(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("csv output failed: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
