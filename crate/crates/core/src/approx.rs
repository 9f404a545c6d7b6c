//! Bernstein approximation of convex set-valued maps and fractal
//! polynomials within a prescribed sup-distance.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compact_set::{CompactSet, Interval};
use crate::error::{Error, Result};
use crate::rb_fractal::{build_base, BaseFunctionSpec, FractalSystem, GridFunction, Partition};
use crate::sv_map::{uniform_grid, MapFamily, SetValuedMap};

/// Bernstein basis `binom(n,k) t^k (1−t)^{n−k}` for `k = 0..=n`, computed in
/// log space so large degrees do not overflow. Exact at `t = 0` and `t = 1`.
pub fn bernstein_weights(n: usize, t: f64) -> Vec<f64> {
    let mut w = vec![0.0; n + 1];
    if t <= 0.0 {
        w[0] = 1.0;
        return w;
    }
    if t >= 1.0 {
        w[n] = 1.0;
        return w;
    }
    let (lt, ls) = (t.ln(), (1.0 - t).ln());
    let mut log_binom = 0.0;
    for (k, slot) in w.iter_mut().enumerate() {
        *slot = (log_binom + k as f64 * lt + (n - k) as f64 * ls).exp();
        log_binom += ((n - k) as f64).ln() - ((k + 1) as f64).ln();
    }
    w
}

/// `Σ_k binom(n,k) t^k (1−t)^{n−k} F(k/n)` with interval coefficients,
/// evaluated endpoint-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct SetPolynomial {
    domain: Interval,
    coeffs: Vec<Interval>,
}

impl SetPolynomial {
    pub fn new(domain: Interval, coeffs: Vec<Interval>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("a set polynomial needs coefficients".into()));
        }
        Ok(SetPolynomial { domain, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Interval] {
        &self.coeffs
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn eval(&self, u: f64) -> CompactSet {
        let t = (u - self.domain.lo()) / self.domain.width();
        let w = bernstein_weights(self.degree(), t.clamp(0.0, 1.0));
        let lo: f64 = w.iter().zip(&self.coeffs).map(|(w, c)| w * c.lo()).sum();
        let hi: f64 = w.iter().zip(&self.coeffs).map(|(w, c)| w * c.hi()).sum();
        CompactSet::from_interval(Interval::new(lo, hi.max(lo)))
    }

    pub fn to_map(&self) -> Result<SetValuedMap> {
        SetValuedMap::new(
            self.domain,
            MapFamily::Bernstein {
                lo: self.domain.lo(),
                hi: self.domain.hi(),
                coeffs: self.coeffs.clone(),
            },
        )
    }
}

/// The degree-`n` Bernstein polynomial of a convex-valued map, with nodes
/// spread uniformly over its domain.
pub fn bernstein(f: &SetValuedMap, n: usize) -> Result<SetPolynomial> {
    if !f.is_convex_valued() {
        return Err(Error::ConvexityRequired(format!(
            "bernstein: `{}` map is not convex-valued",
            f.family_tag()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidInput("Bernstein degree must be >= 1".into()));
    }
    let coeffs = uniform_grid(f.domain(), n + 1)
        .into_iter()
        .map(|u| {
            let v = f.evaluate(u)?;
            Ok(Interval::new(v.lo(), v.hi()))
        })
        .collect::<Result<Vec<_>>>()?;
    SetPolynomial::new(f.domain(), coeffs)
}

/// `max_k H_d(F(u_k), P(u_k))` on a uniform grid.
pub fn bernstein_error(f: &SetValuedMap, p: &SetPolynomial, grid_n: usize) -> Result<f64> {
    let d = uniform_grid(f.domain(), grid_n)
        .into_par_iter()
        .map(|u| Ok(f.evaluate(u)?.hausdorff(&p.eval(u))))
        .collect::<Result<Vec<f64>>>()?;
    Ok(d.into_iter().fold(0.0, f64::max))
}

/// Builds the fractal polynomial `P^α` on the dense set of `partition`.
pub fn fractal_polynomial(
    p: &SetPolynomial,
    partition: &Partition,
    base: &BaseFunctionSpec,
    alpha: f64,
    depth: u32,
    tol: f64,
) -> Result<(FractalSystem, GridFunction)> {
    let pm = p.to_map()?;
    let s = build_base(&pm, base, crate::rb_fractal::DEFAULT_TOL_COMPAT)?;
    let sys = FractalSystem::new(pm, s, partition.clone(), alpha)?;
    let grid = sys.evaluate_fractal(depth, tol)?;
    Ok((sys, grid))
}

/// Knobs of [`approximate_within`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxOptions {
    /// Grid for the Bernstein error during the degree search.
    pub grid_n: usize,
    pub max_degree: usize,
    /// Depth of the dense set on which `P^α` is built and checked.
    pub depth: u32,
    pub tol: f64,
    /// Fraction of the admissible scale bound actually used.
    pub alpha_fraction: f64,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions {
            grid_n: 513,
            max_degree: 4096,
            depth: 6,
            tol: 1e-9,
            alpha_fraction: 0.9,
        }
    }
}

/// Outcome of [`approximate_within`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxReport {
    pub epsilon: f64,
    pub degree: usize,
    pub alpha: f64,
    /// `max H_d(F, P^α)` over the dense set.
    pub achieved: f64,
    /// `max H_d(F, P)` over the dense set.
    pub bernstein_error: f64,
    /// `max H_d(P, P^α)` over the dense set.
    pub fractal_error: f64,
    /// Right side of the perturbation bound for `(P, S_P, α)`.
    pub perturbation_rhs: f64,
    pub partition: Vec<f64>,
    pub depth: u32,
    pub success: bool,
}

impl ApproxReport {
    /// Header plus one CSV record.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "epsilon",
            "n",
            "alpha",
            "achieved",
            "bernstein_error",
            "fractal_error",
            "perturbation_rhs",
            "depth",
            "success",
            "partition_points",
        ])?;
        let pts: Vec<String> = self.partition.iter().map(|p| format!("{p:?}")).collect();
        w.write_record([
            format!("{:?}", self.epsilon),
            self.degree.to_string(),
            format!("{:?}", self.alpha),
            format!("{:?}", self.achieved),
            format!("{:?}", self.bernstein_error),
            format!("{:?}", self.fractal_error),
            format!("{:?}", self.perturbation_rhs),
            self.depth.to_string(),
            self.success.to_string(),
            pts.join(" "),
        ])?;
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }
}

/// Smallest degree found (doubling, then bisection) whose grid Bernstein
/// error is below `target`.
fn search_degree(f: &SetValuedMap, target: f64, opts: &ApproxOptions) -> Result<(usize, f64)> {
    let mut best = f64::INFINITY;
    let mut hi = 1usize;
    let mut hi_err;
    loop {
        hi_err = bernstein_error(f, &bernstein(f, hi)?, opts.grid_n)?;
        best = best.min(hi_err);
        if hi_err < target {
            break;
        }
        if hi >= opts.max_degree {
            return Err(Error::DegreeCapExceeded {
                cap: opts.max_degree,
                best,
                target,
            });
        }
        hi = (hi * 2).min(opts.max_degree);
    }
    let mut lo = hi / 2;
    while hi - lo > 1 && lo >= 1 {
        let mid = lo + (hi - lo) / 2;
        let err = bernstein_error(f, &bernstein(f, mid)?, opts.grid_n)?;
        if err < target {
            hi = mid;
            hi_err = err;
        } else {
            lo = mid;
        }
    }
    Ok((hi, hi_err))
}

/// Finds a fractal polynomial within `epsilon` of a convex-valued `F`:
/// a Bernstein degree with grid error below `ε/3`, then a nonzero scale
///
/// `α = fraction · min{ (ε/3)/(ε/3 + ‖P − S_P‖), (ε/3)/(ε/3 + 2‖P‖) }`
///
/// which keeps the perturbation bound for `P^α` below `ε/3`.
pub fn approximate_within(
    f: &SetValuedMap,
    epsilon: f64,
    base: &BaseFunctionSpec,
    partition: &Partition,
    opts: &ApproxOptions,
) -> Result<ApproxReport> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    if !f.is_convex_valued() {
        return Err(Error::ConvexityRequired(format!(
            "approximate_within: `{}` map is not convex-valued",
            f.family_tag()
        )));
    }
    let third = epsilon / 3.0;
    let (degree, _) = search_degree(f, third, opts)?;
    let p = bernstein(f, degree)?;
    let pm = p.to_map()?;
    let s = build_base(&pm, base, crate::rb_fractal::DEFAULT_TOL_COMPAT)?;

    let mut p_minus_s = 0.0f64;
    let mut p_norm = 0.0f64;
    for u in uniform_grid(f.domain(), opts.grid_n) {
        let pu = pm.evaluate(u)?;
        p_minus_s = p_minus_s.max(pu.hausdorff(&s.evaluate(u)?));
        p_norm = p_norm.max(pu.norm());
    }
    let budget = (third / (third + p_minus_s)).min(third / (third + 2.0 * p_norm));
    let alpha = opts.alpha_fraction * budget;

    let sys = FractalSystem::new(pm.clone(), s, partition.clone(), alpha)?;
    let pa = sys.evaluate_fractal(opts.depth, opts.tol)?;
    let gap = crate::rb_fractal::perturbation_gap(&sys, &pa)?;
    let rows = pa
        .points()
        .par_iter()
        .zip(pa.values().par_iter())
        .map(|(&u, v)| {
            let fu = f.evaluate(u)?;
            let pu = pm.evaluate(u)?;
            Ok((fu.hausdorff(v), fu.hausdorff(&pu)))
        })
        .collect::<Result<Vec<_>>>()?;
    let (achieved, bern) = rows
        .into_iter()
        .fold((0.0f64, 0.0f64), |a, r| (a.0.max(r.0), a.1.max(r.1)));
    Ok(ApproxReport {
        epsilon,
        degree,
        alpha,
        achieved,
        bernstein_error: bern,
        fractal_error: gap.lhs,
        perturbation_rhs: gap.rhs,
        partition: partition.points().to_vec(),
        depth: opts.depth,
        success: achieved < epsilon,
    })
}
