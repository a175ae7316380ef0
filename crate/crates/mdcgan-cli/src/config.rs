//! Layered run configuration: built-in defaults, then an optional JSON
//! file, then command-line flags — later layers override earlier ones,
//! field by field. Unknown keys in the file are errors.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use mdcgan::data::DatasetManifest;
use mdcgan::experiments::{ExperimentKind, ExperimentSpec};
use mdcgan::models::{DiscContract, GenLoss, ModelKind, SigmaA, TrainConfig};

/// Partial training configuration; only the fields present in the file
/// override the running value.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainPatch {
    pub k: Option<usize>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub z_dim: Option<usize>,
    pub batch: Option<usize>,
    pub disc_steps: Option<usize>,
    pub iterations: Option<usize>,
    pub lr: Option<f64>,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub epsilon: Option<f64>,
    pub dropout_disc: Option<f64>,
    pub dropout_gen: Option<f64>,
    pub dropout_net: Option<f64>,
    pub leaky_slope: Option<f64>,
    pub sigma_a: Option<SigmaA>,
    pub gen_loss: Option<GenLoss>,
    pub disc_contract: Option<DiscContract>,
    pub coupled_generator: Option<bool>,
    pub sample_count: Option<usize>,
    pub seed: Option<u64>,
    pub stop_window: Option<usize>,
    pub stop_rel_tol: Option<f64>,
}

macro_rules! apply_fields {
    ($patch:expr, $target:expr, [$($field:ident),* $(,)?]) => {
        $(if let Some(v) = $patch.$field.clone() {
            $target.$field = v;
        })*
    };
}

impl TrainPatch {
    pub fn apply(&self, target: &mut TrainConfig) {
        apply_fields!(
            self,
            target,
            [
                k,
                m,
                n,
                z_dim,
                batch,
                disc_steps,
                iterations,
                lr,
                beta1,
                beta2,
                epsilon,
                dropout_disc,
                dropout_gen,
                dropout_net,
                leaky_slope,
                sigma_a,
                gen_loss,
                disc_contract,
                coupled_generator,
                sample_count,
                seed,
                stop_window,
                stop_rel_tol,
            ]
        );
    }
}

/// Partial experiment configuration from a JSON file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub dataset: Option<DatasetManifest>,
    pub models: Option<Vec<String>>,
    pub noise_levels: Option<Vec<f64>>,
    pub horizon: Option<usize>,
    pub endpoint_only: Option<bool>,
    pub m_values: Option<Vec<usize>>,
    pub seeds: Option<Vec<u64>>,
    pub samples: Option<usize>,
    pub density_resolution: Option<usize>,
    pub train: Option<TrainPatch>,
}

impl RunConfig {
    pub fn load(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {path}"))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("cannot parse config file {path}"))?;
        Ok(cfg)
    }

    /// Applies the file layer onto a default-initialized spec.
    pub fn apply(&self, spec: &mut ExperimentSpec) -> Result<()> {
        if let Some(dataset) = &self.dataset {
            spec.dataset = dataset.clone();
        }
        if let Some(models) = &self.models {
            spec.models = parse_models(models)?;
        }
        if let Some(v) = &self.noise_levels {
            spec.noise_levels = v.clone();
        }
        if let Some(v) = self.horizon {
            spec.horizon = v;
        }
        if let Some(v) = self.endpoint_only {
            spec.endpoint_only = v;
        }
        if let Some(v) = &self.m_values {
            spec.m_values = v.clone();
        }
        if let Some(v) = &self.seeds {
            spec.seeds = v.clone();
        }
        if let Some(v) = self.samples {
            spec.samples = v;
        }
        if let Some(v) = self.density_resolution {
            spec.density_resolution = Some(v);
        }
        if let Some(train) = &self.train {
            train.apply(&mut spec.train);
        }
        Ok(())
    }
}

pub fn parse_models(names: &[String]) -> Result<Vec<ModelKind>> {
    let mut out = Vec::with_capacity(names.len());
    for name in names {
        match name.parse::<ModelKind>() {
            Ok(kind) => out.push(kind),
            Err(e) => bail!("{e}"),
        }
    }
    Ok(out)
}

/// Default spec for a given experiment kind: the canonical synthetic
/// chaotic dataset at the standard split with all six models.
pub fn default_spec(kind: ExperimentKind) -> ExperimentSpec {
    use mdcgan::data::{DataSource, MackeyGlassParams, SplitSpec};
    let dataset = DatasetManifest::new(
        DataSource::MackeyGlass {
            length: 2405,
            params: MackeyGlassParams::default(),
        },
        SplitSpec::default(),
    );
    let models = vec![
        ModelKind::Ar(0),
        ModelKind::Ar(5),
        ModelKind::Snn,
        ModelKind::Cgan,
        ModelKind::Mdn,
        ModelKind::MdCgan,
    ];
    ExperimentSpec::new(kind, dataset, models)
}
