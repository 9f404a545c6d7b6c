//! Experiment configuration: one JSON document per run.

use std::path::Path;

use serde::Deserialize;
use svfractal_core::rb_fractal::{BaseFunctionSpec, Partition};
use svfractal_core::SetValuedMap;

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Build,
    Dimension,
    Approx,
    Ifs,
    Check,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Build => "build",
            Command::Dimension => "dimension",
            Command::Approx => "approx",
            Command::Ifs => "ifs",
            Command::Check => "check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimensionMethod {
    /// Occupied cells of a square mesh over the sampled plane graph.
    GridBox,
    /// Greedy nets of the new graph under `D_𝒢`.
    NetCover,
    /// `(1/η) Σ R_F[W_i]` from column ranges.
    RangeSum,
}

impl DimensionMethod {
    pub fn tag(self) -> &'static str {
        match self {
            DimensionMethod::GridBox => "grid_box",
            DimensionMethod::NetCover => "net_cover",
            DimensionMethod::RangeSum => "range_sum",
        }
    }
}

/// Either explicit scales or `base^{-j}` for `j` in `from..=to`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum EtaSchedule {
    List(Vec<f64>),
    Powers { base: f64, from: i32, to: i32 },
}

impl EtaSchedule {
    pub fn values(&self) -> Vec<f64> {
        match self {
            EtaSchedule::List(v) => v.clone(),
            EtaSchedule::Powers { base, from, to } => (*from..=*to).map(|j| base.powi(-j)).collect(),
        }
    }
}

/// Starting cloud of the Hutchinson iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum IfsInit {
    /// `(u, F^α(u))` on the target grid.
    Target,
    /// `(u, {0})` on the target grid.
    #[default]
    Zero,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub map: Option<SetValuedMap>,
    /// Second map: the upper map `G` for the `constrained` check suite.
    #[serde(default)]
    pub upper: Option<SetValuedMap>,
    #[serde(default)]
    pub base: Option<BaseFunctionSpec>,
    #[serde(default)]
    pub partition: Option<Partition>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub depth: Option<u32>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub grid_n: Option<usize>,
    #[serde(default)]
    pub set_spacing: Option<f64>,
    #[serde(default)]
    pub method: Option<DimensionMethod>,
    #[serde(default)]
    pub eta: Option<EtaSchedule>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub max_degree: Option<usize>,
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default)]
    pub init: Option<IfsInit>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub suite: Option<String>,
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub max_points: Option<usize>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.schema != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "unsupported schema {}, expected {SCHEMA_VERSION}",
                cfg.schema
            )));
        }
        if let Some(a) = cfg.alpha {
            if !(a.abs() < 1.0) {
                return Err(CliError::Config(format!("alpha must satisfy |alpha| < 1, got {a}")));
            }
        }
        for (name, v) in [("tol", cfg.tol), ("set_spacing", cfg.set_spacing), ("delta", cfg.delta)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::Config(format!("{name} must be positive, got {v}")));
                }
            }
        }
        Ok(cfg)
    }

    /// Rejects a config whose `command` field names a different command.
    pub fn check_command(&self, cmd: Command) -> Result<()> {
        match self.command {
            Some(c) if c != cmd => Err(CliError::Config(format!(
                "config is for `{}` but `{}` was requested",
                c.name(),
                cmd.name()
            ))),
            _ => Ok(()),
        }
    }

    pub fn map(&self) -> Result<&SetValuedMap> {
        self.map.as_ref().ok_or_else(|| missing("map"))
    }

    pub fn partition(&self) -> Result<&Partition> {
        self.partition.as_ref().ok_or_else(|| missing("partition"))
    }

    pub fn alpha(&self) -> Result<f64> {
        self.alpha.ok_or_else(|| missing("alpha"))
    }

    pub fn depth(&self) -> Result<u32> {
        self.depth.ok_or_else(|| missing("depth"))
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(1e-9)
    }

    pub fn base(&self) -> BaseFunctionSpec {
        self.base.clone().unwrap_or_else(BaseFunctionSpec::identity_reparam)
    }

    pub fn grid_n(&self) -> Result<usize> {
        match self.grid_n {
            Some(n) if n >= 2 => Ok(n),
            Some(n) => Err(CliError::Config(format!("grid_n must be at least 2, got {n}"))),
            None => Err(missing("grid_n")),
        }
    }

    pub fn etas(&self) -> Result<Vec<f64>> {
        let etas = self.eta.as_ref().ok_or_else(|| missing("eta"))?.values();
        if etas.is_empty() || etas.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(CliError::Config(format!("eta values must be positive, got {etas:?}")));
        }
        Ok(etas)
    }
}

fn missing(field: &str) -> CliError {
    CliError::Config(format!("missing field `{field}`"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_build_config() {
        let cfg = ExperimentConfig::parse(
            r#"{
                "schema": 1,
                "command": "build",
                "map": {"domain": [0, 1], "family": "constant", "set": [[0, 1]]},
                "base": {"type": "same"},
                "partition": [0, 0.5, 1],
                "alpha": 0.5,
                "depth": 6
            }"#,
        )
        .unwrap();
        assert_eq!(cfg.command, Some(Command::Build));
        assert_eq!(cfg.depth().unwrap(), 6);
        assert_eq!(cfg.base(), BaseFunctionSpec::Same);
        assert!(cfg.check_command(Command::Build).is_ok());
        assert!(cfg.check_command(Command::Ifs).is_err());
    }

    #[test]
    fn eta_schedules() {
        let p = EtaSchedule::Powers { base: 2.0, from: 1, to: 3 };
        assert_eq!(p.values(), vec![0.5, 0.25, 0.125]);
        let cfg = ExperimentConfig::parse(r#"{"schema": 1, "eta": [0.1, 0.05]}"#).unwrap();
        assert_eq!(cfg.etas().unwrap(), vec![0.1, 0.05]);
        let cfg =
            ExperimentConfig::parse(r#"{"schema": 1, "eta": {"base": 3, "from": 1, "to": 2}}"#)
                .unwrap();
        assert_eq!(cfg.etas().unwrap().len(), 2);
    }

    #[test]
    fn rejects_bad_documents() {
        for text in [
            r#"{"schema": 2}"#,
            r#"{"schema": 1, "alpha": 1.0}"#,
            r#"{"schema": 1, "tol": 0}"#,
            r#"{"schema": 1, "colour": "red"}"#,
            r#"{"schema": 1, "partition": [0, 1]}"#,
            r#"{"schema": 1, "map": {"domain": [0, 1], "family": "envelope",
                "lo": {"kind": "const", "value": 1}, "hi": {"kind": "const", "value": 0}}}"#,
        ] {
            let err = ExperimentConfig::parse(text).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{text}");
        }
    }
}
