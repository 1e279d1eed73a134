//! Run configuration: TOML files, built-in presets and `--set` overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::Value;
use trp_core::model::{ParamName, ParamValues};
use trp_core::optimize::{OptimizerConfig, ParameterSpace};
use trp_core::{
    GateFrame, GateName, GateRun, PropagationPlan, ScheduleSpec, SweepParameters,
    TwoQubitSystemParameters,
};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Simulate,
    Optimize,
    Scan,
    Converge,
    Report,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Optimize => "optimize",
            Command::Scan => "scan",
            Command::Converge => "converge",
            Command::Report => "report",
        }
    }
}

/// Free parameters for `optimize`: either a `±fraction` box around the
/// configured values or explicit bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub free: Vec<ParamName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub param: ParamName,
    #[serde(default)]
    pub offsets: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeSpec {
    #[serde(default = "default_doublings")]
    pub doublings: usize,
    /// Coarsest subinterval count of the N-doubling ladder; defaults to the
    /// schedule's own count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_subintervals: Option<usize>,
    /// Doublings of the subinterval ladder; defaults to `doublings`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subinterval_doublings: Option<usize>,
}

fn default_doublings() -> usize {
    3
}

impl Default for ConvergeSpec {
    fn default() -> Self {
        Self {
            doublings: default_doublings(),
            base_subintervals: None,
            subinterval_doublings: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    pub target: GateName,
    pub sweep: SweepParameters,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<TwoQubitSystemParameters>,
    pub plan: PropagationPlan,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleSpec>,
    #[serde(default)]
    pub frame: GateFrame,
    #[serde(default)]
    pub allow_1q_symmetrization: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptimizerConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converge: Option<ConvergeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    /// Test hook: score the matrix of this gate instead of simulating.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stub_applied_gate: Option<GateName>,
}

impl RunConfig {
    pub fn params(&self) -> ParamValues {
        ParamValues {
            sweep: self.sweep,
            system: self.system,
        }
    }

    pub fn set_params(&mut self, v: &ParamValues) {
        self.sweep = v.sweep;
        self.system = v.system;
    }

    pub fn gate_run(&self) -> GateRun {
        GateRun {
            target: self.target,
            params: self.params(),
            plan: self.plan,
            schedule: self.schedule,
            frame: self.frame,
            allow_1q_symmetrization: self.allow_1q_symmetrization,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.gate_run().validate().map_err(CliError::from_core)
    }

    pub fn parameter_space(&self) -> Result<ParameterSpace, CliError> {
        let spec = self
            .space
            .as_ref()
            .ok_or_else(|| CliError::Usage("optimize needs a [space] section".into()))?;
        let qubits = self.target.qubits();
        let values = self.params();
        let space = match (spec.fraction, &spec.lower, &spec.upper) {
            (Some(f), None, None) => {
                let mut s = ParameterSpace::around(&values, &spec.free, f, qubits).map_err(CliError::from_core)?;
                if let Some(start) = &spec.start {
                    s.start = Some(start.clone());
                }
                s
            }
            (None, Some(lower), Some(upper)) => {
                let fixed = ParamName::required(qubits)
                    .iter()
                    .filter(|n| !spec.free.contains(n))
                    .filter_map(|n| values.get(*n).map(|v| (*n, v)))
                    .collect();
                let start = match &spec.start {
                    Some(s) => Some(s.clone()),
                    None => spec.free.iter().map(|n| values.get(*n)).collect(),
                };
                ParameterSpace {
                    names: spec.free.clone(),
                    lower: lower.clone(),
                    upper: upper.clone(),
                    start,
                    fixed,
                }
            }
            _ => {
                return Err(CliError::Usage(
                    "space: give either `fraction` or both `lower` and `upper`".into(),
                ))
            }
        };
        space.validate(qubits).map_err(CliError::from_core)?;
        Ok(space)
    }
}

macro_rules! presets {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../presets/", $name, ".toml")))),*]
    };
}

/// Built-in presets, shipped as TOML in `presets/`.
pub const PRESETS: &[(&str, &str)] = presets!(
    "table1-hadamard",
    "table1-not",
    "table1-pi8",
    "table1-phase",
    "table1-hadamard-refine",
    "table1-hadamard-converge",
    "vcp-symmetrized",
    "vcp-refine",
    "vcp-converge",
    "table2-c4",
    "table2-d4",
);

pub fn preset(name: &str) -> Result<&'static str, CliError> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, body)| *body)
        .ok_or_else(|| {
            let known: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            CliError::Usage(format!("unknown preset `{name}` (known: {})", known.join(", ")))
        })
}

pub fn parse_document(text: &str, origin: &str) -> Result<Value, CliError> {
    text.parse::<toml::Table>()
        .map(Value::Table)
        .map_err(|e| CliError::Usage(format!("{origin}: {e}")))
}

pub fn read_document(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_document(&text, &path.display().to_string())
}

/// Parses the right-hand side of `--set`: TOML syntax first, bare string otherwise.
fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Applies one `dotted.key=value` override, creating tables as needed.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("--set expects key=value, got `{assignment}`")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Usage(format!("--set: malformed key `{key}`")));
    }
    let mut node = doc;
    for part in &path[..path.len() - 1] {
        let table = node
            .as_table_mut()
            .ok_or_else(|| CliError::Usage(format!("--set: `{key}` descends into a non-table")))?;
        node = table
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(toml::Table::new()));
    }
    let table = node
        .as_table_mut()
        .ok_or_else(|| CliError::Usage(format!("--set: `{key}` descends into a non-table")))?;
    table.insert(path[path.len() - 1].to_string(), parse_value(raw.trim()));
    Ok(())
}

pub fn into_config(doc: Value) -> Result<RunConfig, CliError> {
    doc.try_into::<RunConfig>()
        .map_err(|e| CliError::Usage(format!("config: {e}")))
}

/// Loads a config file or preset and applies overrides in order.
pub fn load(config: Option<&Path>, preset_name: Option<&str>, sets: &[String]) -> Result<RunConfig, CliError> {
    let mut doc = match (config, preset_name) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("give either --config or --preset, not both".into()))
        }
        (Some(p), None) => read_document(p)?,
        (None, Some(n)) => parse_document(preset(n)?, n)?,
        (None, None) => return Err(CliError::Usage("a --config file or --preset is required".into())),
    };
    for s in sets {
        apply_override(&mut doc, s)?;
    }
    into_config(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses_and_validates() {
        for (name, body) in PRESETS {
            let cfg = into_config(parse_document(body, name).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
            cfg.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(cfg.name.as_deref(), Some(*name));
        }
    }

    #[test]
    fn overrides_parse_as_toml_values() {
        let mut doc = parse_document(preset("table1-hadamard").unwrap(), "t").unwrap();
        apply_override(&mut doc, "sweep.lambda=6.5").unwrap();
        apply_override(&mut doc, "plan.steps = 1000").unwrap();
        apply_override(&mut doc, "frame=lab").unwrap();
        apply_override(&mut doc, "scan.offsets=[0.0, 1e-3]").unwrap();
        apply_override(&mut doc, "scan.param=lambda").unwrap();
        let cfg = into_config(doc).unwrap();
        assert_eq!(cfg.sweep.lambda, 6.5);
        assert_eq!(cfg.plan.steps, 1000);
        assert_eq!(cfg.frame, GateFrame::Lab);
        assert_eq!(cfg.scan.unwrap().offsets, vec![0.0, 1e-3]);
    }

    #[test]
    fn bad_overrides_are_usage_errors() {
        let mut doc = parse_document(preset("table1-hadamard").unwrap(), "t").unwrap();
        assert!(apply_override(&mut doc, "nonsense").is_err());
        assert!(apply_override(&mut doc, "sweep..lambda=1").is_err());
        apply_override(&mut doc, "sweep.colour=1").unwrap();
        assert!(into_config(doc).is_err());
    }
}
