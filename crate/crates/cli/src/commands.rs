use svfractal_core::approx::{approximate_within, ApproxOptions};
use svfractal_core::graph_dim::{
    fit_dimension, grid_box_count, net_cover_count, new_graph_cloud, range_sum_bounds,
    standard_graph_cloud_with, BoxCountTable, GraphCloud, IfsSystem, DEFAULT_MAX_CLOUD_POINTS,
};
use svfractal_core::rb_fractal::{build_base, Partition, DEFAULT_MAX_GRID_POINTS, DEFAULT_TOL_COMPAT};
use svfractal_core::{CompactSet, FractalSystem};

use crate::config::{DimensionMethod, ExperimentConfig, IfsInit};
use crate::error::{CliError, Result};
use crate::output::OutputDir;
use crate::report::RunReport;

fn system(cfg: &ExperimentConfig) -> Result<FractalSystem> {
    let f = cfg.map()?.clone();
    let s = build_base(&f, &cfg.base(), DEFAULT_TOL_COMPAT)?;
    Ok(FractalSystem::new(f, s, cfg.partition()?.clone(), cfg.alpha()?)?)
}

/// Evaluates `F^α` on the dense set and writes `fractal.csv`. Fails when
/// the self-referential residual exceeds `4·tol`.
pub fn run_build(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<RunReport> {
    let mut report = RunReport::new("build");
    let sys = system(cfg)?;
    let tol = cfg.tol();
    let g = sys.evaluate_fractal_with(
        cfg.depth()?,
        tol,
        cfg.max_points.unwrap_or(DEFAULT_MAX_GRID_POINTS),
    )?;
    let residual = sys.residual(&g)?;
    out.write("fractal.csv", |w| g.write_csv(w))?;
    report.value("grid_points", g.len() as f64);
    report.value("compatibility_defect", sys.compatibility_defect()?);
    report.value("residual", residual);
    if residual > 4.0 * tol {
        report.fail(format!("residual {residual:e} exceeds 4*tol = {:e}", 4.0 * tol));
    }
    Ok(report)
}

/// Box counts over the `eta` schedule with the configured method, then a
/// log-log fit. Writes `box_counts.csv` and `dimension.csv`.
pub fn run_dimension(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<RunReport> {
    let mut report = RunReport::new("dimension");
    let f = cfg.map()?;
    let etas = cfg.etas()?;
    if etas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::Config("eta values must be strictly decreasing".into()));
    }
    let method = cfg.method.unwrap_or(DimensionMethod::GridBox);
    let mut table = BoxCountTable::new(method.tag());
    match method {
        DimensionMethod::GridBox => {
            let spacing = cfg
                .set_spacing
                .ok_or_else(|| CliError::Config("grid_box needs `set_spacing`".into()))?;
            let cloud = standard_graph_cloud_with(
                f,
                cfg.grid_n()?,
                spacing,
                cfg.max_points.unwrap_or(DEFAULT_MAX_CLOUD_POINTS),
            )?;
            report.value("cloud_points", cloud.len() as f64);
            for &eta in &etas {
                table.push(eta, grid_box_count(&cloud, eta));
            }
            report.warn(format!(
                "grid_box counts come from a sampled graph (grid_n {}, set_spacing {spacing}); \
                 scales below the sampling resolution undercount",
                cfg.grid_n()?
            ));
        }
        DimensionMethod::NetCover => {
            let cloud = new_graph_cloud(f, cfg.grid_n()?)?;
            for &eta in &etas {
                table.push(eta, net_cover_count(&cloud, eta));
            }
            report.warn("net_cover counts are greedy nets of a sampled graph (within a factor 2 of covering numbers)");
        }
        DimensionMethod::RangeSum => {
            let mut bounds = Vec::with_capacity(etas.len());
            for &eta in &etas {
                let b = range_sum_bounds(f, eta)?;
                table.push(eta, b.lower.ceil().max(1.0) as usize);
                bounds.push((eta, b));
            }
            out.write("range_bounds.csv", |w| {
                let mut c = csv::Writer::from_writer(w);
                c.write_record(["eta", "lower", "upper", "columns"])?;
                for (eta, b) in &bounds {
                    c.write_record([
                        format!("{eta:?}"),
                        format!("{:?}", b.lower),
                        format!("{:?}", b.upper),
                        b.columns.to_string(),
                    ])?;
                }
                c.flush().map_err(|e| svfractal_core::Error::Csv(e.to_string()))
            })?;
            report.warn("range_sum column ranges are sampled, so counts are lower estimates (is_lower_bound)");
        }
    }
    out.write("box_counts.csv", |w| table.write_csv(w))?;
    let fit = fit_dimension(&table)?;
    out.write("dimension.csv", |w| fit.write_csv(w))?;
    report.value("slope", fit.slope);
    report.value("intercept", fit.intercept);
    report.value("r_squared", fit.r_squared);
    Ok(report)
}

/// Fractal-polynomial approximation within `epsilon`; writes
/// `approx.csv` and fails when the achieved error is not below it.
pub fn run_approx(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<RunReport> {
    let mut report = RunReport::new("approx");
    let f = cfg.map()?;
    let eps = cfg.epsilon.ok_or_else(|| CliError::Config("missing field `epsilon`".into()))?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(CliError::Config(format!("epsilon must be positive, got {eps}")));
    }
    let partition = match &cfg.partition {
        Some(p) => p.clone(),
        None => Partition::uniform(f.domain().lo(), f.domain().hi(), 3)?,
    };
    let defaults = ApproxOptions::default();
    let opts = ApproxOptions {
        grid_n: cfg.grid_n.unwrap_or(defaults.grid_n),
        max_degree: cfg.max_degree.unwrap_or(defaults.max_degree),
        depth: cfg.depth.unwrap_or(defaults.depth),
        tol: cfg.tol(),
        ..defaults
    };
    let r = approximate_within(f, eps, &cfg.base(), &partition, &opts)?;
    out.write("approx.csv", |w| r.write_csv(w))?;
    report.value("degree", r.degree as f64);
    report.value("alpha", r.alpha);
    report.value("achieved", r.achieved);
    report.value("bernstein_error", r.bernstein_error);
    report.value("fractal_error", r.fractal_error);
    report.warn(format!(
        "errors are maxima over the depth-{} dense set (is_lower_bound)",
        r.depth
    ));
    if !r.success {
        report.fail(format!("achieved {:e} is not below epsilon {eps:e}", r.achieved));
    }
    Ok(report)
}

/// Hutchinson iteration of the graph IFS towards the sampled attractor.
/// Writes `ifs_trace.csv` (one row per step) and `ifs_cloud.csv`.
pub fn run_ifs(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<RunReport> {
    let mut report = RunReport::new("ifs");
    let steps = cfg.steps.ok_or_else(|| CliError::Config("missing field `steps`".into()))?;
    if steps == 0 {
        return Err(CliError::Config("steps must be at least 1".into()));
    }
    let sys = system(cfg)?;
    let tol = cfg.tol();
    let target_grid = sys.evaluate_fractal_with(
        cfg.depth()?,
        tol,
        cfg.max_points.unwrap_or(DEFAULT_MAX_GRID_POINTS),
    )?;
    let delta = cfg.delta.unwrap_or(target_grid.max_gap() / 2.0);
    let ifs = IfsSystem::new(sys, tol)?;
    let target = GraphCloud::from_grid(&target_grid);
    let init: Vec<(f64, CompactSet)> = match cfg.init.unwrap_or_default() {
        IfsInit::Target => target_grid.iter().map(|(u, v)| (u, v.clone())).collect(),
        IfsInit::Zero => target_grid.points().iter().map(|&u| (u, CompactSet::zero())).collect(),
    };
    let trace = ifs.trace(&init, steps, delta, &target)?;
    out.write("ifs_trace.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["step", "distance", "points"])?;
        for (k, (d, n)) in trace.distances.iter().zip(&trace.sizes).enumerate() {
            c.write_record([(k + 1).to_string(), format!("{d:?}"), n.to_string()])?;
        }
        c.flush().map_err(|e| svfractal_core::Error::Csv(e.to_string()))
    })?;
    out.write("ifs_cloud.csv", |w| trace.final_cloud.write_csv(w))?;
    let bounds = ifs.dim_bounds()?;
    report.value("contraction_ratio", ifs.contraction_ratio());
    report.value("delta", delta);
    report.value("initial_distance", trace.initial_distance);
    report.value("final_distance", *trace.distances.last().expect("steps >= 1"));
    report.value("t_lower", bounds.t_lower);
    report.value("t_upper", bounds.t_upper);
    report.warn(format!(
        "distances are measured against the depth-{} sample of the attractor and are exact only up to grid gap {:e} plus delta",
        target_grid.depth(),
        target_grid.max_gap()
    ));
    Ok(report)
}
