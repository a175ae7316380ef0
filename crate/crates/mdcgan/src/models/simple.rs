//! The non-adversarial learned baselines: mixture-density network and
//! plain MLP regressor, both on the shared generator topology.

use super::builders::build_generator;
use super::checkpoint::TrainMeta;
use super::forecaster::ForecasterInner;
use super::losses::{latent_rows_to_params, mixture_nll_loss, mse_loss};
use super::training::{sample_batch, IterationRecord, SaturationMonitor, TrainingCurve};
use super::{Forecaster, ModelError, ModelKind, TrainConfig};
use crate::data::WindowedDataset;
use crate::mixture::gmm_mode;
use crate::numeric::{AdamState, Mode, NumericError, Rng};

fn check_data(data: &WindowedDataset, cfg: &TrainConfig) -> Result<(), ModelError> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    if data.k != cfg.k {
        return Err(ModelError::InvalidConfig(format!(
            "dataset windows have k = {} but the configuration says k = {}",
            data.k, cfg.k
        )));
    }
    Ok(())
}

fn divergence(iteration: usize, err: ModelError) -> ModelError {
    match err {
        ModelError::Numeric(NumericError::NonFinite { .. }) | ModelError::Mixture(_) => {
            ModelError::Diverged { iteration }
        }
        other => other,
    }
}

/// Mixture-density network: the generator stack without noise input,
/// trained on the mean negative log likelihood.
pub fn train_mdn(
    data: &WindowedDataset,
    cfg: &TrainConfig,
) -> Result<(Forecaster, TrainingCurve), ModelError> {
    check_data(data, cfg)?;
    let mut rng = Rng::from_seed(cfg.seed);
    let net_cfg = TrainConfig {
        dropout_gen: cfg.dropout_net,
        ..cfg.clone()
    };
    let mut network = build_generator(&net_cfg, cfg.k, 3 * cfg.m, &mut rng)?;
    let mut adam = AdamState::new(cfg.lr, cfg.beta1, cfg.beta2, cfg.epsilon);
    let mut monitor = SaturationMonitor::new(cfg.stop_window, cfg.stop_rel_tol);
    let mut curve: TrainingCurve = Vec::new();
    let mut meta = TrainMeta {
        seed: cfg.seed,
        ..Default::default()
    };

    for iteration in 0..cfg.iterations {
        let result: Result<(f64, f64), ModelError> = (|| {
            let (x, y) = sample_batch(data, cfg.batch, &mut rng)?;
            network.set_mode(Mode::Train);
            let latents = network.forward(&x, &mut rng)?;
            let (loss, upstream) = mixture_nll_loss(&latents, &y)?;
            network.backward(&upstream)?;
            adam.step_network(&mut network)?;

            let params = latent_rows_to_params(&latents)?;
            let mse = params
                .iter()
                .zip(&y)
                .map(|(p, &yv)| {
                    let d = gmm_mode(p) - yv;
                    d * d
                })
                .sum::<f64>()
                / y.len() as f64;
            Ok((loss, mse))
        })();
        let (loss, sample_mse) = result.map_err(|e| divergence(iteration, e))?;
        if !loss.is_finite() {
            return Err(ModelError::Diverged { iteration });
        }
        curve.push(IterationRecord {
            iteration,
            loss,
            disc_loss: None,
            sample_mse,
        });
        meta.iterations_run = iteration + 1;
        meta.final_loss = Some(loss);
        meta.gen_adam_steps = adam.steps();
        // The monitored error is the training objective itself.
        if monitor.push(loss) {
            meta.stopped_on_saturation = true;
            break;
        }
    }

    Ok((
        Forecaster {
            kind: ModelKind::Mdn,
            config: cfg.clone(),
            meta,
            inner: ForecasterInner::Net { network },
        },
        curve,
    ))
}

/// Plain MLP point forecaster trained on mean squared error.
pub fn train_snn(
    data: &WindowedDataset,
    cfg: &TrainConfig,
) -> Result<(Forecaster, TrainingCurve), ModelError> {
    check_data(data, cfg)?;
    let mut rng = Rng::from_seed(cfg.seed);
    let net_cfg = TrainConfig {
        dropout_gen: cfg.dropout_net,
        ..cfg.clone()
    };
    let mut network = build_generator(&net_cfg, cfg.k, 1, &mut rng)?;
    let mut adam = AdamState::new(cfg.lr, cfg.beta1, cfg.beta2, cfg.epsilon);
    let mut monitor = SaturationMonitor::new(cfg.stop_window, cfg.stop_rel_tol);
    let mut curve: TrainingCurve = Vec::new();
    let mut meta = TrainMeta {
        seed: cfg.seed,
        ..Default::default()
    };

    for iteration in 0..cfg.iterations {
        let result: Result<f64, ModelError> = (|| {
            let (x, y) = sample_batch(data, cfg.batch, &mut rng)?;
            network.set_mode(Mode::Train);
            let pred = network.forward(&x, &mut rng)?;
            let (loss, upstream) = mse_loss(&pred, &y)?;
            network.backward(&upstream)?;
            adam.step_network(&mut network)?;
            Ok(loss)
        })();
        let loss = result.map_err(|e| divergence(iteration, e))?;
        if !loss.is_finite() {
            return Err(ModelError::Diverged { iteration });
        }
        curve.push(IterationRecord {
            iteration,
            loss,
            disc_loss: None,
            sample_mse: loss,
        });
        meta.iterations_run = iteration + 1;
        meta.final_loss = Some(loss);
        meta.gen_adam_steps = adam.steps();
        if monitor.push(loss) {
            meta.stopped_on_saturation = true;
            break;
        }
    }

    Ok((
        Forecaster {
            kind: ModelKind::Snn,
            config: cfg.clone(),
            meta,
            inner: ForecasterInner::Net { network },
        },
        curve,
    ))
}
