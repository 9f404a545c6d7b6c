use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
    out: PathBuf,
}

fn run(cmd: &str, config: &str, extra: &[&str]) -> (Run, TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    std::fs::write(&cfg, config).unwrap();
    let out = dir.path().join("out");
    let output = Command::new(env!("CARGO_BIN_EXE_svfractal"))
        .arg(cmd)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .output()
        .unwrap();
    let run = Run {
        code: output.status.code().unwrap(),
        stdout: String::from_utf8(output.stdout).unwrap(),
        stderr: String::from_utf8(output.stderr).unwrap(),
        out,
    };
    (run, dir)
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn value(stdout: &str, key: &str) -> f64 {
    let prefix = format!("{key}: ");
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no `{key}` in\n{stdout}"))
        .parse()
        .unwrap()
}

const CONSTANT: &str = r#"{"domain": [0, 1], "family": "constant", "set": [[0, 1]]}"#;

fn build_config(alpha: f64, base: &str) -> String {
    format!(
        r#"{{"schema": 1, "command": "build", "map": {CONSTANT}, "base": {base},
            "partition": [0, 0.5, 1], "alpha": {alpha}, "depth": 6, "tol": 1e-9}}"#
    )
}

#[test]
fn build_constant_system() {
    let (r, _d) = run("build", &build_config(0.5, r#"{"type": "same"}"#), &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(value(&r.stdout, "residual") <= 2e-9);
    let rows = csv_rows(&r.out.join("fractal.csv"));
    assert_eq!(rows.len(), 129);
    for row in rows {
        let (lo, hi): (f64, f64) = (row[3].parse().unwrap(), row[4].parse().unwrap());
        assert!((lo + 1.0).abs() <= 1e-9 && (hi - 2.0).abs() <= 1e-9, "{row:?}");
    }
    assert!(r.stdout.contains("fractal.csv"));
}

#[test]
fn zero_alpha_reproduces_the_seed() {
    let (r, _d) = run("build", &build_config(0.0, r#"{"type": "same"}"#), &[]);
    assert_eq!(r.code, 0);
    for row in csv_rows(&r.out.join("fractal.csv")) {
        assert_eq!((row[3].as_str(), row[4].as_str()), ("0.0", "1.0"));
    }
}

#[test]
fn incompatible_base_is_rejected() {
    let base = r#"{"type": "custom", "map": {"family": "singleton", "f": {"kind": "poly", "coeffs": [0, 1]}}}"#;
    let (r, _d) = run("build", &build_config(0.5, base), &[]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("incompatible"), "{}", r.stderr);
}

#[test]
fn capacity_is_exit_four() {
    let cfg = build_config(0.5, r#"{"type": "same"}"#).replace(r#""depth": 6"#, r#""depth": 40"#);
    let (r, _d) = run("build", &cfg, &[]);
    assert_eq!(r.code, 4, "{}", r.stderr);
}

#[test]
fn config_must_match_the_command() {
    let (r, _d) = run("ifs", &build_config(0.5, r#"{"type": "same"}"#), &[]);
    assert_eq!(r.code, 2);
    let (r, _d) = run("build", "{not json", &[]);
    assert_eq!(r.code, 2);
}

fn dimension_config(map: &str, grid_n: usize, spacing: f64, base: u32, to: i32) -> String {
    format!(
        r#"{{"schema": 1, "command": "dimension", "map": {map}, "method": "grid_box",
            "grid_n": {grid_n}, "set_spacing": {spacing:?},
            "eta": {{"base": {base}, "from": 1, "to": {to}}}}}"#
    )
}

#[test]
fn dimension_of_classical_graphs() {
    let cases = [
        (r#"{"domain": [0, 1], "family": "singleton", "f": {"kind": "const", "value": 0}}"#, 513, 1.0 / 512.0, 2, 8, 1.0),
        (r#"{"domain": [0, 1], "family": "constant", "set": [[-1, 1]]}"#, 513, 1.0 / 512.0, 2, 8, 2.0),
        (r#"{"domain": [0, 1], "family": "cantor_valued", "depth": 5}"#, 487, 1.0 / 729.0, 3, 5, 1.0 + 2f64.ln() / 3f64.ln()),
    ];
    for (map, n, h, base, to, want) in cases {
        let (r, _d) = run("dimension", &dimension_config(map, n, h, base, to), &[]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        let slope = value(&r.stdout, "slope");
        assert!((slope - want).abs() < 0.02, "{map}: {slope} vs {want}");
        assert_eq!(csv_rows(&r.out.join("box_counts.csv")).len(), to as usize);
        assert_eq!(csv_rows(&r.out.join("dimension.csv")).len(), 1);
        assert!(r.stdout.contains("warning: grid_box counts"));
    }
}

#[test]
fn range_sum_writes_bounds() {
    let cfg = r#"{"schema": 1, "command": "dimension",
        "map": {"domain": [0, 1], "family": "constant", "set": [[-1, 1]]},
        "method": "range_sum", "eta": [0.1, 0.05, 0.02, 0.01]}"#;
    let (r, _d) = run("dimension", cfg, &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = csv_rows(&r.out.join("range_bounds.csv"));
    assert_eq!(rows[0], vec!["0.1", "200.0", "220.0", "10"]);
    assert!(r.stdout.contains("is_lower_bound"));
}

#[test]
fn constant_fit_is_degenerate() {
    let cfg = dimension_config(r#"{"domain": [0, 1], "family": "constant", "set": [[0, 0]]}"#, 3, 1.0, 2, 0);
    let cfg = cfg.replace(r#""from": 1, "to": 0"#, r#""from": -3, "to": 0"#);
    let (r, _d) = run("dimension", &cfg, &[]);
    assert_eq!(r.code, 3, "{}{}", r.stdout, r.stderr);
}

fn approx_config(map: &str, eps: f64) -> String {
    format!(r#"{{"schema": 1, "command": "approx", "map": {map}, "epsilon": {eps:?}}}"#)
}

#[test]
fn approximation_runs() {
    let (r, _d) = run("approx", &approx_config(r#"{"domain": [0, 1], "family": "constant", "set": [[-1, 1]]}"#, 0.01), &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(value(&r.stdout, "degree"), 1.0);

    let env = r#"{"domain": [0, 1], "family": "envelope", "lo": {"kind": "const", "value": 0},
                  "hi": {"kind": "poly", "coeffs": [0, 0, 1]}}"#;
    let (r, _d) = run("approx", &approx_config(env, 0.1), &[]);
    assert_eq!(r.code, 0);
    assert!(value(&r.stdout, "alpha") != 0.0);
    assert!(value(&r.stdout, "achieved") < 0.1);
    let rows = csv_rows(&r.out.join("approx.csv"));
    assert_eq!(rows[0][8], "true");

    let (r, _d) = run("approx", &approx_config(env, 0.0), &[]);
    assert_eq!(r.code, 2);
}

fn ifs_config(init: &str, steps: usize) -> String {
    format!(
        r#"{{"schema": 1, "command": "ifs",
            "map": {{"domain": [0, 1], "family": "envelope",
                     "lo": {{"kind": "sin", "amplitude": 0.3, "frequency": 6.0}},
                     "hi": {{"kind": "poly", "coeffs": [0.5, 0.2, 1.0]}}}},
            "partition": [0, 0.5, 1], "alpha": 0.4, "depth": 5, "tol": 1e-12,
            "steps": {steps}, "init": "{init}"}}"#
    )
}

#[test]
fn ifs_from_the_attractor_stays_put() {
    let (r, _d) = run("ifs", &ifs_config("target", 4), &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let delta = value(&r.stdout, "delta");
    for row in csv_rows(&r.out.join("ifs_trace.csv")) {
        let d: f64 = row[1].parse().unwrap();
        assert!(d <= 2e-12 + delta, "{d} > {delta}");
    }
}

#[test]
fn ifs_from_zero_contracts() {
    let (r, _d) = run("ifs", &ifs_config("zero", 10), &[]);
    assert_eq!(r.code, 0);
    let rate = value(&r.stdout, "contraction_ratio") + 0.05;
    let floor = 5.0 * 3.0 * value(&r.stdout, "delta");
    let mut prev = value(&r.stdout, "initial_distance");
    for row in csv_rows(&r.out.join("ifs_trace.csv")) {
        let d: f64 = row[1].parse().unwrap();
        if prev > floor {
            assert!(d <= rate * prev, "{d} > {rate} x {prev}");
        }
        prev = d;
    }
    assert!(prev < floor);
    assert!(!csv_rows(&r.out.join("ifs_cloud.csv")).is_empty());
}

#[test]
fn single_ifs_step_gives_one_row() {
    let (r, _d) = run("ifs", &ifs_config("zero", 1), &[]);
    assert_eq!(r.code, 0);
    assert_eq!(csv_rows(&r.out.join("ifs_trace.csv")).len(), 1);
    let (r, _d) = run("ifs", &ifs_config("zero", 0), &[]);
    assert_eq!(r.code, 2);
}

#[test]
fn check_suites() {
    for suite in ["hausdorff_axioms", "set_algebra", "product_bound", "constrained", "metric_axioms"] {
        let cfg = format!(r#"{{"schema": 1, "suite": "{suite}", "trials": 200}}"#);
        let (r, _d) = run("check", &cfg, &["--seed", "5"]);
        assert_eq!(r.code, 0, "{suite}: {}{}", r.stdout, r.stderr);
        assert!(!r.stdout.contains("FAIL"));
        assert!(csv_rows(&r.out.join("check.csv")).iter().all(|row| row[3] == "0"));
    }
    let (r, _d) = run("check", r#"{"schema": 1, "suite": "perturbation", "trials": 5}"#, &[]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout.matches(" lhs ").count(), 5);
    let (r, _d) = run("check", r#"{"schema": 1, "suite": "nonsense"}"#, &[]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("unknown check suite"));
}

#[test]
fn failed_containment_is_reported() {
    // G lies strictly above zero inside the domain, so F = {0} is not below G.
    let cfg = r#"{"schema": 1, "suite": "constrained",
        "map": {"domain": [0, 1], "family": "singleton", "f": {"kind": "const", "value": 0}},
        "upper": {"domain": [0, 1], "family": "envelope",
                  "lo": {"kind": "poly", "coeffs": [0, 0.5, -0.5]},
                  "hi": {"kind": "poly", "coeffs": [0, 1, -1]}}}"#;
    let (r, _d) = run("check", cfg, &[]);
    assert_eq!(r.code, 2, "{}{}", r.stdout, r.stderr);
    assert!(r.stderr.contains("order"));
}

#[test]
fn outputs_are_deterministic() {
    let cfg = r#"{"schema": 1, "suite": "hausdorff_axioms", "trials": 300}"#;
    let (a, _da) = run("check", cfg, &["--seed", "9"]);
    let (b, _db) = run("check", cfg, &["--seed", "9"]);
    assert_eq!(
        std::fs::read(a.out.join("check.csv")).unwrap(),
        std::fs::read(b.out.join("check.csv")).unwrap()
    );
    let cfg = build_config(0.3, r#"{"type": "type_i", "t": {"kind": "poly", "coeffs": [0, 1]}}"#);
    let (a, _da) = run("build", &cfg, &[]);
    let (b, _db) = run("build", &cfg, &[]);
    assert_eq!(
        std::fs::read(a.out.join("fractal.csv")).unwrap(),
        std::fs::read(b.out.join("fractal.csv")).unwrap()
    );
}
