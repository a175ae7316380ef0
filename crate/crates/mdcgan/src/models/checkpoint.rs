//! Versioned JSON checkpoints: model kind, full configuration, every
//! parameter tensor as a flat array with its shape, and training
//! metadata.

use serde::{Deserialize, Serialize};

use super::{DiscContract, Forecaster, GenLoss, ModelError};

pub const CHECKPOINT_VERSION: u32 = 1;

/// How a model was trained, recorded so results stay attributable.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainMeta {
    pub seed: u64,
    pub iterations_run: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_loss: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_disc_loss: Option<f64>,
    /// Resolved σ_a actually used in the likelihood scaling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_a_used: Option<f64>,
    /// Variance of the training targets, the noise-input variance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub var_data: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen_loss: Option<GenLoss>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disc_contract: Option<DiscContract>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupled_generator: Option<bool>,
    /// True when training ended on loss saturation rather than the cap.
    #[serde(default)]
    pub stopped_on_saturation: bool,
    /// Optimizer step counters, one increment per Adam update.
    #[serde(default)]
    pub gen_adam_steps: u64,
    #[serde(default)]
    pub disc_adam_steps: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub model: Forecaster,
}

impl Checkpoint {
    pub fn new(model: Forecaster) -> Self {
        Self {
            version: CHECKPOINT_VERSION,
            model,
        }
    }

    pub fn to_json(&self) -> Result<String, ModelError> {
        serde_json::to_string_pretty(self).map_err(|e| ModelError::Checkpoint(e.to_string()))
    }

    pub fn from_json(json: &str) -> Result<Forecaster, ModelError> {
        let ckpt: Checkpoint =
            serde_json::from_str(json).map_err(|e| ModelError::Checkpoint(e.to_string()))?;
        if ckpt.version != CHECKPOINT_VERSION {
            return Err(ModelError::Checkpoint(format!(
                "unsupported checkpoint version {} (expected {CHECKPOINT_VERSION})",
                ckpt.version
            )));
        }
        Ok(ckpt.model)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<(), ModelError> {
        let json = self.to_json()?;
        std::fs::write(path, json).map_err(|e| ModelError::Checkpoint(e.to_string()))
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Forecaster, ModelError> {
        let json =
            std::fs::read_to_string(path).map_err(|e| ModelError::Checkpoint(e.to_string()))?;
        Self::from_json(&json)
    }
}
