//! Adversarial training.
//!
//! The mixture-density conditional GAN alternates j discriminator steps
//! and one generator step per iteration. Its discriminator consumes the
//! conditioning window x scaled elementwise by √(2π)·σ_a·L, where L is
//! the generator mixture's likelihood — at the observed value for the
//! real branch, at a value the generator itself emits (a posterior draw)
//! for the fake branch. The discriminator maps that k-vector through the
//! dense stack back to a k-vector; its loss pulls real inputs toward x
//! and fake inputs toward zero:
//!
//!   L_D = mean ‖D(x·c·L(y)) − x‖² + ‖D(x·c·L(ŷ))‖²,  c = √(2π)·σ_a
//!
//! which reduces to the parameter-free scaled-input loss when D is the
//! identity (the `literal` contract). The generator update descends the
//! mean negative likelihood of the observed value under its mixture; the
//! discriminator influences it only in the optional coupled mode.
//!
//! Each update touches only its own network: generator parameters are
//! constants during discriminator steps and vice versa.

use super::builders::{build_discriminator, build_generator};
use super::checkpoint::TrainMeta;
use super::forecaster::ForecasterInner;
use super::losses::{latent_rows_to_params, mixture_nll_loss, mixture_raw_loss, MixtureEval};
use super::training::{
    noise_batch, sample_batch, IterationRecord, SaturationMonitor, TrainingCurve,
};
use super::{
    bce_loss, DiscContract, Forecaster, GenLoss, ModelError, ModelKind, SigmaA, TrainConfig,
};
use crate::data::WindowedDataset;
use crate::mixture::{gmm_mode, gmm_sample, likelihood, map_latents, GmmParams, LatentTriple};
use crate::numeric::{AdamState, Matrix, Mode, Network, NumericError, Rng};

const SQRT_2PI: f64 = 2.5066282746310002;

/// √(2π)·σ_a·L(params at y): the elementwise scale applied to the
/// conditioning vector before it enters the discriminator.
pub fn likelihood_scale(params: &GmmParams, at: f64, sigma_a: f64) -> f64 {
    SQRT_2PI * sigma_a * likelihood(params, at)
}

/// One discriminator batch: the conditioning windows with their real and
/// fake likelihood scales.
#[derive(Debug, Clone)]
pub struct DiscBatch {
    x: Matrix,
    real_scale: Vec<f64>,
    fake_scale: Vec<f64>,
}

impl DiscBatch {
    /// Scales from the generator's posteriors: the real branch evaluates
    /// the mixture at the observed target, the fake branch at the
    /// generated value sampled from the same posterior.
    pub fn new(
        x: &Matrix,
        y: &[f64],
        g_params: &[GmmParams],
        generated: &[f64],
        sigma_a: f64,
    ) -> Result<Self, ModelError> {
        if x.rows() != y.len() || y.len() != g_params.len() || y.len() != generated.len() {
            return Err(ModelError::BatchMismatch {
                op: "disc batch",
                rows: x.rows(),
                targets: y.len(),
            });
        }
        let real_scale = g_params
            .iter()
            .zip(y)
            .map(|(p, &yv)| likelihood_scale(p, yv, sigma_a))
            .collect();
        let fake_scale = g_params
            .iter()
            .zip(generated)
            .map(|(p, &g)| likelihood_scale(p, g, sigma_a))
            .collect();
        Ok(Self {
            x: x.clone(),
            real_scale,
            fake_scale,
        })
    }

    /// Directly supplied scales (tests, diagnostics).
    pub fn from_scales(
        x: &Matrix,
        real_scale: Vec<f64>,
        fake_scale: Vec<f64>,
    ) -> Result<Self, ModelError> {
        if x.rows() != real_scale.len() || x.rows() != fake_scale.len() {
            return Err(ModelError::BatchMismatch {
                op: "disc batch",
                rows: x.rows(),
                targets: real_scale.len(),
            });
        }
        Ok(Self {
            x: x.clone(),
            real_scale,
            fake_scale,
        })
    }

    /// Stacked inputs (real rows then fake rows) and their targets
    /// (x rows then zero rows).
    fn training_matrices(&self) -> Result<(Matrix, Matrix), NumericError> {
        let n = self.x.rows();
        let k = self.x.cols();
        let mut inputs = Matrix::zeros(2 * n, k);
        let mut targets = Matrix::zeros(2 * n, k);
        for i in 0..n {
            for c in 0..k {
                let xv = self.x.get(i, c);
                inputs.set(i, c, xv * self.real_scale[i]);
                inputs.set(n + i, c, xv * self.fake_scale[i]);
                targets.set(i, c, xv);
            }
        }
        inputs.ensure_finite("disc batch inputs")?;
        Ok((inputs, targets))
    }

    fn batch_len(&self) -> usize {
        self.x.rows()
    }
}

/// Discriminator loss for a prepared batch:
/// mean over the batch of ‖D(x·c·L(y)) − x‖² + ‖D(x·c·L(ŷ))‖².
/// `None` evaluates the literal parameter-free contract (D = identity).
pub fn mdcgan_disc_loss(disc: Option<&Network>, batch: &DiscBatch) -> Result<f64, ModelError> {
    let (inputs, targets) = batch.training_matrices()?;
    let outputs = match disc {
        Some(d) => d.infer(&inputs)?,
        None => inputs,
    };
    let diff = outputs.sub(&targets)?;
    Ok(diff.sum_sq() / batch.batch_len() as f64)
}

/// Generator loss: mean over the batch of −L(G) evaluated at the true
/// targets.
pub fn mdcgan_gen_loss(g_params: &[GmmParams], y: &[f64]) -> Result<f64, ModelError> {
    if g_params.len() != y.len() || y.is_empty() {
        return Err(ModelError::BatchMismatch {
            op: "gen loss",
            rows: g_params.len(),
            targets: y.len(),
        });
    }
    let total: f64 = g_params
        .iter()
        .zip(y)
        .map(|(p, &yv)| -likelihood(p, yv))
        .sum();
    Ok(total / y.len() as f64)
}

fn resolve_sigma_a(cfg: &TrainConfig, targets: &[f64]) -> f64 {
    match cfg.sigma_a {
        SigmaA::Fixed(v) => v,
        SigmaA::FromData => population_variance(targets).sqrt(),
    }
}

fn population_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

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

/// Non-finite numeric failures inside a training iteration surface as
/// divergence with the iteration index attached. Mixture failures mid-
/// training can only come from degenerate latents (the topology fixes
/// their shape), so they count as divergence too.
fn divergence(iteration: usize, err: ModelError) -> ModelError {
    match err {
        ModelError::Numeric(NumericError::NonFinite { .. }) | ModelError::Mixture(_) => {
            ModelError::Diverged { iteration }
        }
        other => other,
    }
}

/// One discriminator update: draw (x, y, z), read the generator's
/// posteriors as constants, scale, and descend the discriminator loss.
/// Returns the loss and the conditioning batch for the generator step.
fn mdcgan_disc_step(
    data: &WindowedDataset,
    cfg: &TrainConfig,
    var_data: f64,
    sigma_a: f64,
    generator: &Network,
    discriminator: Option<&mut Network>,
    adam_d: &mut AdamState,
    rng: &mut Rng,
) -> Result<(f64, Matrix, Vec<f64>), ModelError> {
    let (x, y) = sample_batch(data, cfg.batch, rng)?;
    let z = noise_batch(cfg.batch, cfg.z_dim, var_data, rng);
    let latents = generator.infer(&x.hcat(&z)?)?;
    let params = latent_rows_to_params(&latents)?;
    let generated: Vec<f64> = params.iter().map(|p| gmm_sample(p, rng)).collect();
    let batch = DiscBatch::new(&x, &y, &params, &generated, sigma_a)?;

    let loss = match discriminator {
        Some(d) => {
            d.set_mode(Mode::Train);
            let (inputs, targets) = batch.training_matrices()?;
            let outputs = d.forward(&inputs, rng)?;
            let diff = outputs.sub(&targets)?;
            let loss = diff.sum_sq() / cfg.batch as f64;
            let upstream = diff.scale(2.0 / cfg.batch as f64)?;
            d.backward(&upstream)?;
            adam_d.step_network(d)?;
            loss
        }
        // Literal contract: the loss exists but has no parameters.
        None => mdcgan_disc_loss(None, &batch)?,
    };
    Ok((loss, x, y))
}

/// One generator update on a given conditioning batch with fresh noise.
/// Returns the generator loss and the batch point-forecast MSE.
fn mdcgan_gen_step(
    cfg: &TrainConfig,
    x: &Matrix,
    y: &[f64],
    var_data: f64,
    sigma_a: f64,
    generator: &mut Network,
    discriminator: Option<&mut Network>,
    adam_g: &mut AdamState,
    rng: &mut Rng,
) -> Result<(f64, f64), ModelError> {
    let z = noise_batch(cfg.batch, cfg.z_dim, var_data, rng);
    generator.set_mode(Mode::Train);
    let latents = generator.forward(&x.hcat(&z)?, rng)?;
    let (gen_loss, mut upstream) = match cfg.gen_loss {
        GenLoss::RawLikelihood => mixture_raw_loss(&latents, y)?,
        GenLoss::LogLikelihood => mixture_nll_loss(&latents, y)?,
    };
    if cfg.coupled_generator {
        if let Some(d) = discriminator {
            add_fooling_gradient(&mut upstream, &latents, x, sigma_a, d, rng)?;
        }
    }
    generator.backward(&upstream)?;
    adam_g.step_network(generator)?;

    // Monitored "average sample error": eval-mode point-forecast MSE of
    // the batch after the update, free of dropout noise.
    let z_eval = noise_batch(cfg.batch, cfg.z_dim, var_data, rng);
    let eval_latents = generator.infer(&x.hcat(&z_eval)?)?;
    let params = latent_rows_to_params(&eval_latents)?;
    let sample_mse = params
        .iter()
        .zip(y)
        .map(|(p, &yv)| {
            let d = gmm_mode(p) - yv;
            d * d
        })
        .sum::<f64>()
        / y.len() as f64;

    Ok((gen_loss, sample_mse))
}

/// Optional coupled-mode term: mean ‖D(x·c·L(ŷ)) − x‖² added to the
/// generator objective, differentiated through the scale into the
/// latents (the drawn value ŷ itself is treated as a constant).
fn add_fooling_gradient(
    upstream: &mut Matrix,
    latents: &Matrix,
    x: &Matrix,
    sigma_a: f64,
    disc: &mut Network,
    rng: &mut Rng,
) -> Result<(), ModelError> {
    let n = latents.rows();
    let mut scales = Vec::with_capacity(n);
    let mut evals = Vec::with_capacity(n);
    let mut generated = Vec::with_capacity(n);
    for i in 0..n {
        let triple = LatentTriple::from_flat(latents.row(i))?;
        let params = map_latents(&triple)?;
        let g = gmm_sample(&params, rng);
        let eval = MixtureEval::new(latents.row(i), g)?;
        scales.push(SQRT_2PI * sigma_a * eval.likelihood());
        evals.push(eval);
        generated.push(g);
    }
    let mut inputs = Matrix::zeros(n, x.cols());
    for i in 0..n {
        for c in 0..x.cols() {
            inputs.set(i, c, x.get(i, c) * scales[i]);
        }
    }
    disc.set_mode(Mode::Eval);
    let outputs = disc.forward(&inputs, rng)?;
    let diff = outputs.sub(x)?;
    let out_grad = diff.scale(2.0 / n as f64)?;
    // The discriminator's own gradients are overwritten by its next
    // training step; only the input gradient matters here.
    let input_grad = disc.backward(&out_grad)?;
    for i in 0..n {
        let mut dscale = 0.0;
        for c in 0..x.cols() {
            dscale += input_grad.get(i, c) * x.get(i, c);
        }
        let dldl = dscale * SQRT_2PI * sigma_a;
        for (c, g) in evals[i].density_grad(generated[i]).iter().enumerate() {
            let v = upstream.get(i, c) + dldl * g;
            upstream.set(i, c, v);
        }
    }
    Ok(())
}

/// Mixture-density conditional GAN training: per iteration, j
/// discriminator Adam steps followed by one generator Adam step, with
/// noise drawn i.i.d. N(0, var of training targets). Stops at the
/// iteration cap or when the trailing-window batch point-forecast error
/// saturates.
pub fn train_mdcgan(
    data: &WindowedDataset,
    cfg: &TrainConfig,
) -> Result<(Forecaster, TrainingCurve), ModelError> {
    check_data(data, cfg)?;
    let mut rng = Rng::from_seed(cfg.seed);
    let var_data = population_variance(&data.targets);
    let sigma_a = resolve_sigma_a(cfg, &data.targets);

    let mut generator = build_generator(cfg, cfg.k + cfg.z_dim, 3 * cfg.m, &mut rng)?;
    let mut discriminator = match cfg.disc_contract {
        DiscContract::Learned => Some(build_discriminator(cfg, cfg.k, cfg.k, false, &mut rng)?),
        DiscContract::Literal => None,
    };
    let mut adam_g = AdamState::new(cfg.lr, cfg.beta1, cfg.beta2, cfg.epsilon);
    let mut adam_d = AdamState::new(cfg.lr, cfg.beta1, cfg.beta2, cfg.epsilon);
    let mut monitor = SaturationMonitor::new(cfg.stop_window, cfg.stop_rel_tol);
    let mut curve: TrainingCurve = Vec::new();
    let mut meta = TrainMeta {
        seed: cfg.seed,
        sigma_a_used: Some(sigma_a),
        var_data: Some(var_data),
        gen_loss: Some(cfg.gen_loss),
        disc_contract: Some(cfg.disc_contract),
        coupled_generator: Some(cfg.coupled_generator),
        ..Default::default()
    };

    for iteration in 0..cfg.iterations {
        let step: Result<(f64, f64, f64), ModelError> = (|| {
            let mut disc_loss = 0.0;
            let mut batch = None;
            for _ in 0..cfg.disc_steps {
                let (loss, x, y) = mdcgan_disc_step(
                    data,
                    cfg,
                    var_data,
                    sigma_a,
                    &generator,
                    discriminator.as_mut(),
                    &mut adam_d,
                    &mut rng,
                )?;
                disc_loss = loss;
                batch = Some((x, y));
            }
            let (x, y) = batch.expect("disc_steps >= 1");
            let (gen_loss, sample_mse) = mdcgan_gen_step(
                cfg,
                &x,
                &y,
                var_data,
                sigma_a,
                &mut generator,
                discriminator.as_mut(),
                &mut adam_g,
                &mut rng,
            )?;
            Ok((gen_loss, disc_loss, sample_mse))
        })();
        let (gen_loss, disc_loss, sample_mse) = step.map_err(|e| divergence(iteration, e))?;
        if !gen_loss.is_finite() || !disc_loss.is_finite() {
            return Err(ModelError::Diverged { iteration });
        }
        curve.push(IterationRecord {
            iteration,
            loss: gen_loss,
            disc_loss: Some(disc_loss),
            sample_mse,
        });
        meta.iterations_run = iteration + 1;
        meta.final_loss = Some(gen_loss);
        meta.final_disc_loss = Some(disc_loss);
        meta.gen_adam_steps = adam_g.steps();
        meta.disc_adam_steps = adam_d.steps();
        if monitor.push(sample_mse) {
            meta.stopped_on_saturation = true;
            break;
        }
    }

    let model = Forecaster {
        kind: ModelKind::MdCgan,
        config: cfg.clone(),
        meta,
        inner: ForecasterInner::Gan {
            generator,
            discriminator,
        },
    };
    Ok((model, curve))
}

/// Standard conditional GAN: point generator against a logistic
/// discriminator on [x, y] pairs with binary cross-entropy, the
/// generator taking the non-saturating real-label objective.
pub fn train_cgan(
    data: &WindowedDataset,
    cfg: &TrainConfig,
) -> Result<(Forecaster, TrainingCurve), ModelError> {
    check_data(data, cfg)?;
    let mut rng = Rng::from_seed(cfg.seed);
    let var_data = population_variance(&data.targets);

    let mut generator = build_generator(cfg, cfg.k + cfg.z_dim, 1, &mut rng)?;
    let mut discriminator = build_discriminator(cfg, cfg.k + 1, 1, true, &mut rng)?;
    let mut adam_g = AdamState::new(cfg.lr, cfg.beta1, cfg.beta2, cfg.epsilon);
    let mut adam_d = AdamState::new(cfg.lr, cfg.beta1, cfg.beta2, cfg.epsilon);
    let mut monitor = SaturationMonitor::new(cfg.stop_window, cfg.stop_rel_tol);
    let mut curve: TrainingCurve = Vec::new();
    let mut meta = TrainMeta {
        seed: cfg.seed,
        var_data: Some(var_data),
        ..Default::default()
    };

    let mut labels = vec![1.0; cfg.batch];
    labels.extend(std::iter::repeat(0.0).take(cfg.batch));

    for iteration in 0..cfg.iterations {
        let result: Result<(f64, f64, f64), ModelError> = (|| {
            let mut disc_loss = 0.0;
            let mut batch = None;
            for _ in 0..cfg.disc_steps {
                let (x, y) = sample_batch(data, cfg.batch, &mut rng)?;
                let z = noise_batch(cfg.batch, cfg.z_dim, var_data, &mut rng);
                let fake = generator.infer(&x.hcat(&z)?)?;
                let y_col = Matrix::from_vec(cfg.batch, 1, y.clone())?;
                let inputs = x.hcat(&y_col)?.vcat(&x.hcat(&fake)?)?;
                discriminator.set_mode(Mode::Train);
                let probs = discriminator.forward(&inputs, &mut rng)?;
                let (loss, upstream) = bce_loss(&probs, &labels)?;
                discriminator.backward(&upstream)?;
                adam_d.step_network(&mut discriminator)?;
                disc_loss = loss;
                batch = Some((x, y));
            }
            let (x, y) = batch.expect("disc_steps >= 1");

            let z = noise_batch(cfg.batch, cfg.z_dim, var_data, &mut rng);
            generator.set_mode(Mode::Train);
            let fake = generator.forward(&x.hcat(&z)?, &mut rng)?;
            // Push fakes toward the discriminator's "real" label; the
            // discriminator runs in eval mode and is not stepped.
            discriminator.set_mode(Mode::Eval);
            let probs = discriminator.forward(&x.hcat(&fake)?, &mut rng)?;
            let ones = vec![1.0; cfg.batch];
            let (gen_loss, upstream) = bce_loss(&probs, &ones)?;
            let input_grad = discriminator.backward(&upstream)?;
            let mut fake_grad = Matrix::zeros(cfg.batch, 1);
            for i in 0..cfg.batch {
                fake_grad.set(i, 0, input_grad.get(i, cfg.k));
            }
            generator.backward(&fake_grad)?;
            adam_g.step_network(&mut generator)?;

            // Eval-mode sample error after the update.
            let z_eval = noise_batch(cfg.batch, cfg.z_dim, var_data, &mut rng);
            let fake_eval = generator.infer(&x.hcat(&z_eval)?)?;
            let sample_mse = fake_eval
                .data()
                .iter()
                .zip(&y)
                .map(|(p, &t)| (p - t) * (p - t))
                .sum::<f64>()
                / y.len() as f64;
            Ok((gen_loss, disc_loss, sample_mse))
        })();
        let (gen_loss, disc_loss, sample_mse) = result.map_err(|e| divergence(iteration, e))?;
        if !gen_loss.is_finite() || !disc_loss.is_finite() {
            return Err(ModelError::Diverged { iteration });
        }
        curve.push(IterationRecord {
            iteration,
            loss: gen_loss,
            disc_loss: Some(disc_loss),
            sample_mse,
        });
        meta.iterations_run = iteration + 1;
        meta.final_loss = Some(gen_loss);
        meta.final_disc_loss = Some(disc_loss);
        meta.gen_adam_steps = adam_g.steps();
        meta.disc_adam_steps = adam_d.steps();
        if monitor.push(sample_mse) {
            meta.stopped_on_saturation = true;
            break;
        }
    }

    let model = Forecaster {
        kind: ModelKind::Cgan,
        config: cfg.clone(),
        meta,
        inner: ForecasterInner::Gan {
            generator,
            discriminator: Some(discriminator),
        },
    };
    Ok((model, curve))
}

#[cfg(test)]
#[path = "gan_tests.rs"]
mod tests;
