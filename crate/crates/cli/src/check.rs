//! Seeded randomized property suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use svfractal_core::rb_fractal::{constrained_check, perturbation_gap, Partition};
use svfractal_core::sample::{random_convex_map, random_interval, random_set, random_system, SystemParams};
use svfractal_core::sv_map::{bv_metric, holder_metric, sup_distance};
use svfractal_core::{CompactSet, Interval, ScalarFn, SetValuedMap};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::output::OutputDir;
use crate::report::RunReport;

pub const SUITES: [&str; 6] = [
    "hausdorff_axioms",
    "set_algebra",
    "product_bound",
    "perturbation",
    "constrained",
    "metric_axioms",
];

/// Tally for one property.
#[derive(Debug, Clone)]
pub struct PropertyOutcome {
    pub property: &'static str,
    pub trials: usize,
    pub failures: usize,
    pub counterexample: Option<String>,
    /// Extra per-trial records (e.g. both sides of an inequality).
    pub log: Vec<String>,
}

impl PropertyOutcome {
    fn new(property: &'static str) -> Self {
        PropertyOutcome {
            property,
            trials: 0,
            failures: 0,
            counterexample: None,
            log: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(witness());
            }
        }
    }
}

const SET_TOL: f64 = 1e-10;

fn hausdorff_axioms(rng: &mut ChaCha8Rng, trials: usize) -> Vec<PropertyOutcome> {
    let mut sym = PropertyOutcome::new("symmetry");
    let mut ident = PropertyOutcome::new("identity");
    let mut tri = PropertyOutcome::new("triangle");
    for _ in 0..trials {
        let (a, b, c) = (random_set(rng, 4, 5.0), random_set(rng, 4, 5.0), random_set(rng, 4, 5.0));
        sym.record(a.hausdorff(&b) == b.hausdorff(&a), || format!("A = {a}, B = {b}"));
        ident.record(a.hausdorff(&a) == 0.0, || format!("A = {a}"));
        tri.record(
            a.hausdorff(&c) <= a.hausdorff(&b) + b.hausdorff(&c) + SET_TOL,
            || format!("A = {a}, B = {b}, C = {c}"),
        );
    }
    vec![sym, ident, tri]
}

fn set_algebra(rng: &mut ChaCha8Rng, trials: usize) -> Vec<PropertyOutcome> {
    let mut sum = PropertyOutcome::new("sum_nonexpansive");
    let mut scale = PropertyOutcome::new("scaling_homogeneous");
    let mut cancel = PropertyOutcome::new("interval_cancellation");
    for _ in 0..trials {
        let s: Vec<CompactSet> = (0..4).map(|_| random_set(rng, 4, 5.0)).collect();
        let (a, b, c, d) = (&s[0], &s[1], &s[2], &s[3]);
        sum.record(
            (a + c).hausdorff(&(b + d)) <= a.hausdorff(b) + c.hausdorff(d) + SET_TOL,
            || format!("A = {a}, B = {b}, C = {c}, D = {d}"),
        );
        let lambda = rng.gen_range(-3.0..3.0);
        let lhs = a.scale(lambda).hausdorff(&b.scale(lambda));
        scale.record((lhs - lambda.abs() * a.hausdorff(b)).abs() <= SET_TOL, || {
            format!("lambda = {lambda}, A = {a}, B = {b}")
        });
        let (p, q, r) = (random_interval(rng, 3.0), random_interval(rng, 3.0), random_interval(rng, 3.0));
        cancel.record(
            ((&p + &r).hausdorff(&(&q + &r)) - p.hausdorff(&q)).abs() <= SET_TOL,
            || format!("A = {p}, B = {q}, D = {r}"),
        );
    }
    vec![sum, scale, cancel]
}

fn product_bound(rng: &mut ChaCha8Rng, trials: usize) -> Vec<PropertyOutcome> {
    let mut out = PropertyOutcome::new("product_lipschitz");
    for _ in 0..trials {
        let (a, c, b) = (random_set(rng, 3, 2.0), random_set(rng, 3, 2.0), random_set(rng, 3, 2.0));
        let lhs = a.product(&b).hausdorff(&c.product(&b));
        out.record(lhs <= b.norm() * a.hausdorff(&c) + SET_TOL, || {
            format!("A = {a}, C = {c}, B = {b}")
        });
    }
    vec![out]
}

fn perturbation(rng: &mut ChaCha8Rng, trials: usize, tol: f64) -> Result<Vec<PropertyOutcome>> {
    let mut out = PropertyOutcome::new("perturbation_bound");
    for _ in 0..trials {
        let r = random_system(rng, &SystemParams::default())?;
        let g = r.system.evaluate_fractal(r.depth, tol)?;
        let gap = perturbation_gap(&r.system, &g)?;
        out.log.push(format!(
            "alpha {:+.4} depth {}: lhs {:.6e} rhs {:.6e}",
            r.system.alpha(),
            r.depth,
            gap.lhs,
            gap.rhs
        ));
        out.record(gap.lhs <= gap.rhs + 4.0 * tol, || {
            format!(
                "alpha {} partition {:?}: lhs {} > rhs {}",
                r.system.alpha(),
                r.system.partition().points(),
                gap.lhs,
                gap.rhs
            )
        });
    }
    Ok(vec![out])
}

fn constrained(cfg: &ExperimentConfig, tol: f64) -> Result<Vec<PropertyOutcome>> {
    let unit = Interval::new(0.0, 1.0);
    let f = match &cfg.map {
        Some(f) => f.clone(),
        None => SetValuedMap::singleton(unit, ScalarFn::constant(0.0))?,
    };
    let g = match &cfg.upper {
        Some(g) => g.clone(),
        None => SetValuedMap::envelope(
            unit,
            ScalarFn::poly([0.0, -1.0, 1.0]),
            ScalarFn::poly([0.0, 1.0, -1.0]),
        )?,
    };
    let partition = match &cfg.partition {
        Some(p) => p.clone(),
        None => Partition::uniform(f.domain().lo(), f.domain().hi(), 3)?,
    };
    let alpha = cfg.alpha.unwrap_or(0.4);
    let depth = cfg.depth.unwrap_or(6);
    let mut out = PropertyOutcome::new("containment");
    let ok = constrained_check(&f, &g, &partition, alpha, depth, 1e-8, tol)?;
    out.record(ok, || {
        format!("F^alpha not inside G^alpha at depth {depth}, alpha {alpha}")
    });
    Ok(vec![out])
}

fn metric_axioms(rng: &mut ChaCha8Rng, trials: usize, grid_n: usize) -> Result<Vec<PropertyOutcome>> {
    let unit = Interval::new(0.0, 1.0);
    let mut sym = PropertyOutcome::new("map_metric_symmetry");
    let mut tri = PropertyOutcome::new("map_metric_triangle");
    type Metric = fn(&SetValuedMap, &SetValuedMap, usize) -> svfractal_core::Result<f64>;
    let metrics: [(&str, Metric); 3] = [
        ("sup", |a, b, n| Ok(sup_distance(a, b, n)?.value)),
        ("holder_0.5", |a, b, n| Ok(holder_metric(a, b, 0.5, n)?.value)),
        ("bv", |a, b, n| Ok(bv_metric(a, b, n)?.value)),
    ];
    for _ in 0..trials {
        let f = random_convex_map(rng, unit);
        let g = random_convex_map(rng, unit);
        let h = random_convex_map(rng, unit);
        for (name, d) in metrics {
            let (fg, gf) = (d(&f, &g, grid_n)?, d(&g, &f, grid_n)?);
            sym.record((fg - gf).abs() <= SET_TOL, || format!("{name}: d(F,G) = {fg}, d(G,F) = {gf}"));
            let (fh, gh) = (d(&f, &h, grid_n)?, d(&g, &h, grid_n)?);
            tri.record(fh <= fg + gh + SET_TOL, || {
                format!("{name}: d(F,H) = {fh} > d(F,G) + d(G,H) = {}", fg + gh)
            });
        }
    }
    Ok(vec![sym, tri])
}

/// Runs the suite named in the config and writes `check.csv`.
pub fn run_check(cfg: &ExperimentConfig, seed: u64, out: &mut OutputDir) -> Result<RunReport> {
    let suite = cfg
        .suite
        .clone()
        .ok_or_else(|| CliError::Config("missing field `suite`".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = cfg.tol();
    let outcomes = match suite.as_str() {
        "hausdorff_axioms" => hausdorff_axioms(&mut rng, cfg.trials.unwrap_or(10_000)),
        "set_algebra" => set_algebra(&mut rng, cfg.trials.unwrap_or(10_000)),
        "product_bound" => product_bound(&mut rng, cfg.trials.unwrap_or(10_000)),
        "perturbation" => perturbation(&mut rng, cfg.trials.unwrap_or(25), tol)?,
        "constrained" => constrained(cfg, tol)?,
        "metric_axioms" => metric_axioms(&mut rng, cfg.trials.unwrap_or(20), cfg.grid_n.unwrap_or(65))?,
        other => return Err(CliError::UnknownSuite(other.to_string())),
    };
    let mut report = RunReport::new("check");
    report.lines.push(format!("suite: {suite} (seed {seed})"));
    for o in &outcomes {
        let verdict = if o.failures == 0 { "PASS" } else { "FAIL" };
        report.lines.push(format!(
            "{verdict} {}: {} trials, {} failures",
            o.property, o.trials, o.failures
        ));
        report.lines.extend(o.log.iter().map(|l| format!("  {l}")));
        if let Some(c) = &o.counterexample {
            report.lines.push(format!("  counterexample: {c}"));
        }
    }
    out.write("check.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["suite", "property", "trials", "failures", "counterexample"])?;
        for o in &outcomes {
            c.write_record([
                suite.as_str(),
                o.property,
                &o.trials.to_string(),
                &o.failures.to_string(),
                o.counterexample.as_deref().unwrap_or(""),
            ])?;
        }
        c.flush().map_err(|e| svfractal_core::Error::Csv(e.to_string()))
    })?;
    let failed: Vec<&str> = outcomes.iter().filter(|o| o.failures > 0).map(|o| o.property).collect();
    if !failed.is_empty() {
        report.fail(format!("properties failed: {}", failed.join(", ")));
    }
    Ok(report)
}
