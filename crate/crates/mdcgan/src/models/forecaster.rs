//! The unified forecaster: one type for the five model families.

use serde::{Deserialize, Serialize};

use super::checkpoint::TrainMeta;
use super::training::noise_batch;
use super::{ArModel, ModelError, TrainConfig};
use crate::mixture::{gmm_mode, map_latents, pool_uniform, GmmParams, LatentTriple};
use crate::numeric::{Matrix, Network, Rng};

/// Model identifier; parses from and prints to the command-line names
/// (`mdcgan`, `cgan`, `mdn`, `snn`, `ar<p>`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    MdCgan,
    Cgan,
    Mdn,
    Snn,
    Ar(usize),
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelKind::MdCgan => write!(f, "mdcgan"),
            ModelKind::Cgan => write!(f, "cgan"),
            ModelKind::Mdn => write!(f, "mdn"),
            ModelKind::Snn => write!(f, "snn"),
            ModelKind::Ar(p) => write!(f, "ar{p}"),
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mdcgan" => Ok(ModelKind::MdCgan),
            "cgan" => Ok(ModelKind::Cgan),
            "mdn" => Ok(ModelKind::Mdn),
            "snn" => Ok(ModelKind::Snn),
            other => {
                if let Some(order) = other.strip_prefix("ar") {
                    order
                        .parse::<usize>()
                        .map(ModelKind::Ar)
                        .map_err(|_| format!("bad AR order in {other:?}"))
                } else {
                    Err(format!(
                        "unknown model {other:?} (expected mdcgan|cgan|mdn|snn|ar<p>)"
                    ))
                }
            }
        }
    }
}

impl Serialize for ModelKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ModelKind {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A forecast: always a point value, plus the full mixture posterior for
/// the models that have one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Prediction {
    pub point: f64,
    pub posterior: Option<GmmParams>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) enum ForecasterInner {
    Gan {
        generator: Network,
        discriminator: Option<Network>,
    },
    Net {
        network: Network,
    },
    Linear {
        model: ArModel,
    },
}

/// A trained model. Immutable after fitting; prediction never mutates,
/// so a forecaster can be shared across threads.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Forecaster {
    pub kind: ModelKind,
    pub config: TrainConfig,
    pub meta: TrainMeta,
    pub(crate) inner: ForecasterInner,
}

impl Forecaster {
    /// Wraps an already-fitted AR model in the common interface.
    pub fn from_ar_model(model: ArModel, config: TrainConfig) -> Self {
        Self {
            kind: ModelKind::Ar(model.order),
            meta: TrainMeta {
                seed: config.seed,
                ..Default::default()
            },
            config,
            inner: ForecasterInner::Linear { model },
        }
    }

    pub(crate) fn generator(&self) -> Option<&Network> {
        match &self.inner {
            ForecasterInner::Gan { generator, .. } => Some(generator),
            ForecasterInner::Net { network } => Some(network),
            ForecasterInner::Linear { .. } => None,
        }
    }

    pub(crate) fn discriminator(&self) -> Option<&Network> {
        match &self.inner {
            ForecasterInner::Gan { discriminator, .. } => discriminator.as_ref(),
            _ => None,
        }
    }

    pub fn ar_model(&self) -> Option<&ArModel> {
        match &self.inner {
            ForecasterInner::Linear { model } => Some(model),
            _ => None,
        }
    }

    fn check_window(&self, window: &[f64]) -> Result<(), ModelError> {
        match &self.inner {
            ForecasterInner::Linear { model } => {
                if window.len() < model.order.max(1) {
                    return Err(ModelError::WindowTooShort {
                        got: window.len(),
                        needed: model.order.max(1),
                    });
                }
            }
            _ => {
                if window.len() != self.config.k {
                    return Err(ModelError::WindowWidth {
                        expected: self.config.k,
                        got: window.len(),
                    });
                }
            }
        }
        Ok(())
    }

    /// One-step forecast from a window of past observations (most recent
    /// last). The stochastic models draw `samples` noise vectors:
    /// MD-CGAN pools the resulting posteriors uniformly and reports the
    /// pooled mode, CGAN averages its point outputs. MDN, SNN and AR are
    /// deterministic and ignore `samples`. Networks run in eval mode.
    pub fn predict(
        &self,
        window: &[f64],
        samples: usize,
        rng: &mut Rng,
    ) -> Result<Prediction, ModelError> {
        if samples == 0 {
            return Err(ModelError::ZeroSamples);
        }
        self.check_window(window)?;
        match (self.kind, &self.inner) {
            (ModelKind::MdCgan, ForecasterInner::Gan { generator, .. }) => {
                let var = self.meta.var_data.unwrap_or(1.0);
                let mut posteriors = Vec::with_capacity(samples);
                for _ in 0..samples {
                    let z = noise_batch(1, self.config.z_dim, var, rng);
                    let x = Matrix::row_vector(window)?.hcat(&z)?;
                    let latents = generator.infer(&x)?;
                    let triple = LatentTriple::from_flat(latents.row(0))?;
                    posteriors.push(map_latents(&triple)?);
                }
                let pooled = pool_uniform(&posteriors)?;
                Ok(Prediction {
                    point: gmm_mode(&pooled),
                    posterior: Some(pooled),
                })
            }
            (ModelKind::Cgan, ForecasterInner::Gan { generator, .. }) => {
                let var = self.meta.var_data.unwrap_or(1.0);
                let mut sum = 0.0;
                for _ in 0..samples {
                    let z = noise_batch(1, self.config.z_dim, var, rng);
                    let x = Matrix::row_vector(window)?.hcat(&z)?;
                    sum += generator.infer(&x)?.get(0, 0);
                }
                Ok(Prediction {
                    point: sum / samples as f64,
                    posterior: None,
                })
            }
            (ModelKind::Mdn, ForecasterInner::Net { network }) => {
                let x = Matrix::row_vector(window)?;
                let latents = network.infer(&x)?;
                let triple = LatentTriple::from_flat(latents.row(0))?;
                let params = map_latents(&triple)?;
                Ok(Prediction {
                    point: gmm_mode(&params),
                    posterior: Some(params),
                })
            }
            (ModelKind::Snn, ForecasterInner::Net { network }) => {
                let x = Matrix::row_vector(window)?;
                Ok(Prediction {
                    point: network.infer(&x)?.get(0, 0),
                    posterior: None,
                })
            }
            (ModelKind::Ar(_), ForecasterInner::Linear { model }) => Ok(Prediction {
                point: model.predict(window)?,
                posterior: None,
            }),
            _ => Err(ModelError::Checkpoint(format!(
                "model kind {} does not match its stored parameters",
                self.kind
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_kind_round_trips() {
        for kind in [
            ModelKind::MdCgan,
            ModelKind::Cgan,
            ModelKind::Mdn,
            ModelKind::Snn,
            ModelKind::Ar(0),
            ModelKind::Ar(5),
        ] {
            let s = kind.to_string();
            assert_eq!(s.parse::<ModelKind>().unwrap(), kind);
            let json = serde_json::to_string(&kind).unwrap();
            assert_eq!(serde_json::from_str::<ModelKind>(&json).unwrap(), kind);
        }
        assert!("arx".parse::<ModelKind>().is_err());
        assert!("gan".parse::<ModelKind>().is_err());
    }
}
