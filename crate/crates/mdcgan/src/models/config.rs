//! Training hyperparameters. Defaults follow the common published GAN
//! recipe this toolkit's experiments assume: n = 20 base neurons,
//! Adam(0.001, 0.9, 0.999, 1e-7), discriminator dropout 0.4, generator
//! dropout 0.5, leaky ReLU slope 0.2, likelihood scale σ_a = 0.2, j = 1
//! discriminator steps per generator step.

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Source of the likelihood scale σ_a in the discriminator input
/// x·√(2π)·σ_a·L: a fixed constant or the standard deviation of the
/// training targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaA {
    Fixed(f64),
    FromData,
}

impl Default for SigmaA {
    fn default() -> Self {
        SigmaA::Fixed(0.2)
    }
}

impl Serialize for SigmaA {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            SigmaA::Fixed(v) => serializer.serialize_f64(*v),
            SigmaA::FromData => serializer.serialize_str("data"),
        }
    }
}

impl<'de> Deserialize<'de> for SigmaA {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Fixed(f64),
            Tag(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Fixed(v) => Ok(SigmaA::Fixed(v)),
            Repr::Tag(s) if s == "data" => Ok(SigmaA::FromData),
            Repr::Tag(s) => Err(serde::de::Error::custom(format!(
                "sigma_a must be a number or \"data\", got {s:?}"
            ))),
        }
    }
}

impl std::str::FromStr for SigmaA {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "data" {
            return Ok(SigmaA::FromData);
        }
        s.parse::<f64>()
            .map(SigmaA::Fixed)
            .map_err(|_| format!("sigma_a must be a number or \"data\", got {s:?}"))
    }
}

/// Generator objective: the raw negative likelihood, or its
/// log-stabilized variant for cases where raw likelihood gradients
/// vanish far from the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenLoss {
    #[default]
    RawLikelihood,
    LogLikelihood,
}

/// Placement of the discriminator network in the adversarial loss:
/// `Learned` maps the scaled k-vector through the dense stack (the real
/// term targets x, the fake term targets zero); `Literal` keeps the
/// identity map, leaving the loss parameter-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscContract {
    #[default]
    Learned,
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    /// Input window length.
    pub k: usize,
    /// Mixture components.
    pub m: usize,
    /// Base layer width; generator blocks are n, 2n, 4n and discriminator
    /// blocks 2n.
    pub n: usize,
    /// Noise vector length.
    pub z_dim: usize,
    /// Minibatch size N.
    pub batch: usize,
    /// Discriminator steps per generator step (j).
    pub disc_steps: usize,
    /// Iteration cap; saturation stopping may end training earlier.
    pub iterations: usize,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub dropout_disc: f64,
    pub dropout_gen: f64,
    /// Dropout for the non-adversarial nets (MDN, SNN); the published
    /// 0.5/0.4 rates are scoped to the GAN generator and discriminator.
    pub dropout_net: f64,
    pub leaky_slope: f64,
    pub sigma_a: SigmaA,
    pub gen_loss: GenLoss,
    pub disc_contract: DiscContract,
    /// Adds the fooling term ‖D(x·c·L(G)) − x‖² to the generator
    /// objective. Off by default: the generator update descends −L alone.
    pub coupled_generator: bool,
    /// Posteriors pooled per prediction for the stochastic models.
    pub sample_count: usize,
    pub seed: u64,
    /// Trailing-window length for saturation stopping.
    pub stop_window: usize,
    /// Relative improvement under which the monitored error counts as
    /// saturated.
    pub stop_rel_tol: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            k: 5,
            m: 1,
            n: 20,
            z_dim: 5,
            batch: 64,
            disc_steps: 1,
            iterations: 20_000,
            lr: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-7,
            dropout_disc: 0.4,
            dropout_gen: 0.5,
            dropout_net: 0.0,
            leaky_slope: 0.2,
            sigma_a: SigmaA::default(),
            gen_loss: GenLoss::default(),
            disc_contract: DiscContract::default(),
            coupled_generator: false,
            sample_count: 100,
            seed: 0,
            stop_window: 200,
            stop_rel_tol: 1e-3,
        }
    }
}

impl TrainConfig {
    /// Structural fields must be at least 1; `iterations` may be 0, which
    /// yields an untrained model whose predict still runs.
    pub fn validate(&self) -> Result<(), ModelError> {
        let positives = [
            ("k", self.k),
            ("m", self.m),
            ("n", self.n),
            ("z_dim", self.z_dim),
            ("batch", self.batch),
            ("disc_steps", self.disc_steps),
            ("sample_count", self.sample_count),
            ("stop_window", self.stop_window),
        ];
        for (name, v) in positives {
            if v == 0 {
                return Err(ModelError::InvalidConfig(format!("{name} must be >= 1")));
            }
        }
        for (name, v) in [
            ("dropout_disc", self.dropout_disc),
            ("dropout_gen", self.dropout_gen),
            ("dropout_net", self.dropout_net),
        ] {
            if !(0.0..1.0).contains(&v) {
                return Err(ModelError::InvalidConfig(format!(
                    "{name} must lie in [0,1), got {v}"
                )));
            }
        }
        if !(self.leaky_slope > 0.0) {
            return Err(ModelError::InvalidConfig(format!(
                "leaky_slope must be > 0, got {}",
                self.leaky_slope
            )));
        }
        if let SigmaA::Fixed(v) = self.sigma_a {
            if !(v > 0.0) {
                return Err(ModelError::InvalidConfig(format!(
                    "sigma_a must be > 0, got {v}"
                )));
            }
        }
        for (name, v) in [
            ("lr", self.lr),
            ("epsilon", self.epsilon),
            ("stop_rel_tol", self.stop_rel_tol),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ModelError::InvalidConfig(format!(
                    "{name} must be a positive number, got {v}"
                )));
            }
        }
        for (name, v) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&v) {
                return Err(ModelError::InvalidConfig(format!(
                    "{name} must lie in [0,1), got {v}"
                )));
            }
        }
        Ok(())
    }
}
