//! Experiment configuration: one strict JSON document.

use std::path::Path;

use pdelab_core::ann::{LayerSpec, TrainConfig, Transfer};
use pdelab_core::pde::{PoissonProblem, DEFAULT_NODES};
use pdelab_core::regress::SyntheticSpec;
use pdelab_core::surrogate::{
    DataCurveSettings, EvalSettings, ParameterSpace, Sampling, SplitRatios,
    DEFAULT_EXTRAP_MULTIPLIERS,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regression: Option<SyntheticSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arch: Option<ArchSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train: Option<TrainConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval: Option<EvalSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub costs: Option<CostSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    #[serde(default = "default_nodes")]
    pub n_nodes: usize,
    pub cases: Vec<ProblemCase>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemCase {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub g: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default = "one")]
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl ProblemCase {
    pub fn problem(&self) -> PoissonProblem {
        PoissonProblem {
            g: self.g,
            x0: self.x0,
            x1: self.x1,
            y0: self.y0,
            y1: self.y1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSection {
    pub g_range: [f64; 2],
    pub y0_range: [f64; 2],
    pub y1_range: [f64; 2],
    #[serde(default = "unit_domain")]
    pub domain: [f64; 2],
    pub sampling: Sampling,
    pub n_samples: usize,
    pub master_seed: u64,
    #[serde(default = "default_nodes")]
    pub n_nodes: usize,
}

impl SpaceSection {
    pub fn parameter_space(&self) -> ParameterSpace {
        ParameterSpace {
            g_range: self.g_range,
            y0_range: self.y0_range,
            y1_range: self.y1_range,
            domain: self.domain,
            sampling: self.sampling,
            n_samples: self.n_samples,
            master_seed: self.master_seed,
        }
    }
}

/// Hidden layers plus the transfer of the output layer, whose size is
/// implied by the task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchSection {
    #[serde(default)]
    pub hidden: Vec<LayerSpec>,
    #[serde(default = "purelin")]
    pub output_transfer: Transfer,
}

impl ArchSection {
    pub fn layers(&self, n_out: usize) -> Vec<LayerSpec> {
        let mut layers = self.hidden.clone();
        layers.push(LayerSpec {
            size: n_out,
            transfer: self.output_transfer,
        });
        layers
    }
}

impl Default for ArchSection {
    fn default() -> Self {
        Self {
            hidden: Vec::new(),
            output_transfer: Transfer::Purelin,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSection {
    pub ratios: SplitRatios,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    pub split: SplitSection,
    #[serde(default = "default_multipliers")]
    pub extrap_multipliers: Vec<f64>,
    #[serde(default = "default_perturbations")]
    pub perturbations: Vec<f64>,
    pub extrap_samples: usize,
    pub extrap_seed: u64,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default = "default_predictions")]
    pub n_predictions: u64,
    #[serde(default)]
    pub arch_sweep: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_curve: Option<DataCurveSettings>,
}

impl EvalSection {
    pub fn settings(&self) -> EvalSettings {
        EvalSettings {
            extrap_multipliers: self.extrap_multipliers.clone(),
            perturbations: self.perturbations.clone(),
            extrap_samples: self.extrap_samples,
            extrap_seed: self.extrap_seed,
        }
    }
}

/// Externally measured times for the `breakeven` sub-command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSection {
    pub t_dg: f64,
    pub t_nt: f64,
    pub t_pr: f64,
    pub t_solve: f64,
    pub n_predictions: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

fn default_nodes() -> usize {
    DEFAULT_NODES
}

fn one() -> f64 {
    1.0
}

fn unit_domain() -> [f64; 2] {
    [0.0, 1.0]
}

fn purelin() -> Transfer {
    Transfer::Purelin
}

fn default_multipliers() -> Vec<f64> {
    DEFAULT_EXTRAP_MULTIPLIERS.to_vec()
}

fn default_perturbations() -> Vec<f64> {
    vec![0.0, 0.01, 0.1]
}

fn default_repetitions() -> usize {
    20
}

fn default_predictions() -> u64 {
    1000
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::MissingInput(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn require<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        section
            .as_ref()
            .ok_or_else(|| CliError::Config(format!("config has no `{name}` section")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"{
        "problem": {"n_nodes": 11, "cases": [{"label": "a", "g": 1, "y0": 0, "y1": 1}]},
        "regression": {"n": 100, "true_w": 2, "true_b": -4, "x_range": [-4, 4],
                       "noise_amplitude": 2, "seed": 1},
        "space": {"g_range": [0, 4], "y0_range": [0, 0], "y1_range": [0, 0],
                  "sampling": "uniform_random", "n_samples": 64, "master_seed": 3},
        "arch": {"hidden": [{"size": 8, "transfer": "tanh"}]},
        "train": {"learning_rate": 0.005, "stop_tolerance": 1e-20, "max_epochs": 5000,
                  "init_seed": 7, "init_scheme": "uniform"},
        "eval": {"split": {"ratios": {"train": 0.8, "val": 0.1, "test": 0.1}, "seed": 5},
                 "extrap_samples": 32, "extrap_seed": 9,
                 "data_curve": {"sample_counts": [4, 8], "seeds": [1], "holdout_samples": 8,
                                "holdout_seed": 2}},
        "costs": {"t_dg": 1, "t_nt": 2, "t_pr": 0.001, "t_solve": 0.1, "n_predictions": 10},
        "output": {"dir": "out", "format": "csv"}
    }"#;

    #[test]
    fn round_trip_is_identity() {
        let a = ExperimentConfig::parse(FULL).unwrap();
        let text = serde_json::to_string_pretty(&a).unwrap();
        let b = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(a, b);
        assert_eq!(text, serde_json::to_string_pretty(&b).unwrap());
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let err = ExperimentConfig::parse("{\n  \"problem\": {\"cases\": [], \"nodes\": 3}\n}")
            .unwrap_err()
            .to_string();
        assert!(err.contains("nodes") && err.contains("line 2"), "{err}");
        assert!(ExperimentConfig::parse(r#"{"extra": 1}"#).is_err());
    }

    #[test]
    fn empty_document_is_valid() {
        let c = ExperimentConfig::parse("{}").unwrap();
        assert!(c.problem.is_none() && c.space.is_none());
        assert!(ExperimentConfig::require(&c.problem, "problem").is_err());
    }

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::parse(FULL).unwrap();
        let eval = c.eval.unwrap();
        assert_eq!(eval.extrap_multipliers, DEFAULT_EXTRAP_MULTIPLIERS.to_vec());
        assert!(!eval.arch_sweep);
        assert_eq!(c.space.unwrap().n_nodes, DEFAULT_NODES);
        assert_eq!(c.arch.unwrap().layers(101).last().unwrap().size, 101);
    }
}
