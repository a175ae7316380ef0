//! Declarative experiment descriptions.

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::data::DatasetManifest;
use crate::models::{ModelKind, TrainConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    NoiseSweep,
    Horizon,
    MixtureOrder,
}

fn default_noise_levels() -> Vec<f64> {
    vec![0.0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30]
}

fn default_horizon() -> usize {
    50
}

fn default_m_values() -> Vec<usize> {
    vec![1, 2, 3]
}

fn default_seeds() -> Vec<u64> {
    vec![1, 2, 3]
}

fn default_samples() -> usize {
    100
}

/// Everything needed to run (or bit-identically re-run) one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub dataset: DatasetManifest,
    pub models: Vec<ModelKind>,
    /// Test-set perturbation levels as fractions of the clean range.
    #[serde(default = "default_noise_levels")]
    pub noise_levels: Vec<f64>,
    /// Steps per recursive forecast in the horizon study.
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    /// Score only the final step of each recursive path instead of
    /// averaging over the whole path.
    #[serde(default)]
    pub endpoint_only: bool,
    /// Mixture orders for the mixture-order study.
    #[serde(default = "default_m_values")]
    pub m_values: Vec<usize>,
    /// One full training run per seed; cells report the median.
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Noise draws pooled per prediction by the stochastic models.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub train: TrainConfig,
    /// When set, the study also evaluates posterior densities on a
    /// uniform y-grid of this many points for the first seed's model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_resolution: Option<usize>,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, dataset: DatasetManifest, models: Vec<ModelKind>) -> Self {
        Self {
            kind,
            dataset,
            models,
            noise_levels: default_noise_levels(),
            horizon: default_horizon(),
            endpoint_only: false,
            m_values: default_m_values(),
            seeds: default_seeds(),
            samples: default_samples(),
            train: TrainConfig::default(),
            density_resolution: None,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.seeds.is_empty() {
            return Err(ExperimentError::InvalidSpec("at least one seed".into()));
        }
        match self.kind {
            ExperimentKind::MixtureOrder => {
                if self.m_values.is_empty() || self.m_values.iter().any(|&m| m == 0) {
                    return Err(ExperimentError::InvalidSpec(
                        "m values must be present and >= 1".into(),
                    ));
                }
            }
            _ => {
                if self.models.is_empty() {
                    return Err(ExperimentError::InvalidSpec("at least one model".into()));
                }
            }
        }
        if self.noise_levels.iter().any(|&p| p < 0.0) {
            return Err(ExperimentError::InvalidSpec("noise levels must be >= 0".into()));
        }
        if self.noise_levels.is_empty() && self.kind == ExperimentKind::NoiseSweep {
            return Err(ExperimentError::InvalidSpec("at least one noise level".into()));
        }
        if self.horizon == 0 {
            return Err(ExperimentError::InvalidSpec("horizon must be >= 1".into()));
        }
        if self.samples == 0 {
            return Err(ExperimentError::InvalidSpec("samples must be >= 1".into()));
        }
        self.train
            .validate()
            .map_err(|e| ExperimentError::InvalidSpec(e.to_string()))
    }
}
