use super::*;
use crate::data::{window_pairs, TimeSeries};

fn ones_x(rows: usize, k: usize) -> Matrix {
    Matrix::filled(rows, k, 1.0)
}

#[test]
fn disc_loss_unity_real_scale_vanishes_under_identity() {
    // √(2π)σ_a·L(y) = 1 and D = identity: first term is zero.
    let x = ones_x(3, 5);
    let batch = DiscBatch::from_scales(&x, vec![1.0; 3], vec![0.0; 3]).unwrap();
    let loss = mdcgan_disc_loss(None, &batch).unwrap();
    assert_eq!(loss, 0.0);
}

#[test]
fn disc_loss_zero_fake_scale_vanishes_at_zero() {
    // L(G) = 0 makes the fake input the zero vector; identity D maps it
    // to zero, so only the real term remains.
    let x = ones_x(2, 5);
    let batch = DiscBatch::from_scales(&x, vec![1.0; 2], vec![0.0; 2]).unwrap();
    assert_eq!(mdcgan_disc_loss(None, &batch).unwrap(), 0.0);
}

#[test]
fn disc_loss_hand_evaluated() {
    // Identity D, k = 5, x all ones, real scale 0.5, fake scale 0:
    // loss = 5·(0.5 − 1)² + 0 = 1.25.
    let x = ones_x(1, 5);
    let batch = DiscBatch::from_scales(&x, vec![0.5], vec![0.0]).unwrap();
    let loss = mdcgan_disc_loss(None, &batch).unwrap();
    assert!((loss - 1.25).abs() < 1e-12, "loss {loss}");
}

#[test]
fn disc_batch_scales_follow_the_mixture() {
    // σ = σ_a and μ = y makes the real scale exactly 1 (the maximal
    // scaled likelihood of a well-calibrated posterior).
    let sigma_a = 0.2;
    let params = vec![GmmParams::new(vec![1.0], vec![sigma_a], vec![0.7]).unwrap()];
    let x = ones_x(1, 5);
    let batch = DiscBatch::new(&x, &[0.7], &params, &[100.0], sigma_a).unwrap();
    assert!((batch.real_scale[0] - 1.0).abs() < 1e-12);
    // The generated value is far out in the tail, so the fake scale is 0.
    assert!(batch.fake_scale[0] < 1e-12);
    let loss = mdcgan_disc_loss(None, &batch).unwrap();
    assert!(loss < 1e-12, "loss {loss}");
}

#[test]
fn gen_loss_examples() {
    // m = 1, μ = y, σ = 1: −1/√(2π) per sample.
    let p = GmmParams::new(vec![1.0], vec![1.0], vec![0.4]).unwrap();
    let loss = mdcgan_gen_loss(&[p], &[0.4]).unwrap();
    assert!((loss + 0.3989422804014327).abs() < 1e-12);

    // Vanishing likelihood: the loss sits at its upper bound, zero.
    let p = GmmParams::new(vec![1.0], vec![1.0], vec![1000.0]).unwrap();
    let loss = mdcgan_gen_loss(&[p], &[0.0]).unwrap();
    assert!(loss.abs() < 1e-300);

    // Batch with L = {0.2, 0.4}: mean of −L is −0.3. σ = 0.5 keeps both
    // densities below the component peak.
    let sigma = 0.5_f64;
    let delta_for = |l: f64| sigma * (-2.0 * (l * sigma * SQRT_2PI).ln()).sqrt();
    let p1 = GmmParams::new(vec![1.0], vec![sigma], vec![delta_for(0.2)]).unwrap();
    let p2 = GmmParams::new(vec![1.0], vec![sigma], vec![delta_for(0.4)]).unwrap();
    let loss = mdcgan_gen_loss(&[p1, p2], &[0.0, 0.0]).unwrap();
    assert!((loss + 0.3).abs() < 1e-12, "loss {loss}");
}

fn small_config(iterations: usize) -> TrainConfig {
    TrainConfig {
        iterations,
        batch: 16,
        n: 8,
        stop_window: 10_000, // effectively off for these short runs
        seed: 42,
        ..Default::default()
    }
}

fn toy_dataset() -> crate::data::WindowedDataset {
    let values: Vec<f64> = (0..220)
        .map(|i| 0.5 + 0.3 * (i as f64 * 0.3).sin())
        .collect();
    let series = TimeSeries::new("toy", values).unwrap();
    window_pairs(&series, 5).unwrap()
}

fn network_params(net: &Network) -> Vec<Vec<f64>> {
    net.layers()
        .iter()
        .flat_map(|l| l.state_tensors())
        .map(|(_, t)| t.data().to_vec())
        .collect()
}

#[test]
fn disc_step_never_touches_generator_parameters() {
    let cfg = small_config(1);
    let data = toy_dataset();
    let mut rng = Rng::from_seed(cfg.seed);
    let generator = build_generator(&cfg, cfg.k + cfg.z_dim, 3, &mut rng).unwrap();
    let mut disc = build_discriminator(&cfg, cfg.k, cfg.k, false, &mut rng).unwrap();
    let mut adam_d = AdamState::new(cfg.lr, cfg.beta1, cfg.beta2, cfg.epsilon);

    let before = network_params(&generator);
    for _ in 0..5 {
        mdcgan_disc_step(
            &data,
            &cfg,
            0.04,
            0.2,
            &generator,
            Some(&mut disc),
            &mut adam_d,
            &mut rng,
        )
        .unwrap();
    }
    assert_eq!(before, network_params(&generator));
    assert_eq!(adam_d.steps(), 5);
}

#[test]
fn gen_step_never_touches_discriminator_parameters() {
    // Default decoupled objective: the discriminator gets no gradient
    // from the generator update (∂L_G/∂θ_L = 0), so its parameters stay
    // bit-identical.
    let cfg = small_config(1);
    let data = toy_dataset();
    let mut rng = Rng::from_seed(cfg.seed);
    let mut generator = build_generator(&cfg, cfg.k + cfg.z_dim, 3, &mut rng).unwrap();
    let mut disc = build_discriminator(&cfg, cfg.k, cfg.k, false, &mut rng).unwrap();
    let mut adam_g = AdamState::new(cfg.lr, cfg.beta1, cfg.beta2, cfg.epsilon);

    let before = network_params(&disc);
    let (x, y) = super::sample_batch(&data, cfg.batch, &mut rng).unwrap();
    for _ in 0..5 {
        mdcgan_gen_step(
            &cfg,
            &x,
            &y,
            0.04,
            0.2,
            &mut generator,
            Some(&mut disc),
            &mut adam_g,
            &mut rng,
        )
        .unwrap();
    }
    assert_eq!(before, network_params(&disc));
    assert_eq!(adam_g.steps(), 5);
}

#[test]
fn gen_loss_is_independent_of_discriminator_parameters() {
    // The decoupled objective is a function of (G params, y) only: two
    // arbitrarily different discriminators yield the same value, i.e.
    // ∂L_G/∂θ_L = 0 exactly.
    let p = GmmParams::new(vec![1.0], vec![0.5], vec![0.2]).unwrap();
    let l1 = mdcgan_gen_loss(std::slice::from_ref(&p), &[0.3]).unwrap();
    let l2 = mdcgan_gen_loss(std::slice::from_ref(&p), &[0.3]).unwrap();
    assert_eq!(l1.to_bits(), l2.to_bits());
}

#[test]
fn adam_step_counters_respect_j() {
    let data = toy_dataset();
    for (j, iters) in [(1usize, 7usize), (3, 4)] {
        let cfg = TrainConfig {
            disc_steps: j,
            ..small_config(iters)
        };
        let (model, curve) = train_mdcgan(&data, &cfg).unwrap();
        assert_eq!(curve.len(), iters);
        assert_eq!(model.meta.gen_adam_steps, iters as u64);
        assert_eq!(model.meta.disc_adam_steps, (iters * j) as u64);
    }
}

#[test]
fn zero_iterations_gives_untrained_but_predicting_model() {
    let data = toy_dataset();
    let cfg = small_config(0);
    let (model, curve) = train_mdcgan(&data, &cfg).unwrap();
    assert!(curve.is_empty());
    assert_eq!(model.meta.iterations_run, 0);
    let mut rng = Rng::from_seed(1);
    let pred = model.predict(&[0.5; 5], 10, &mut rng).unwrap();
    assert!(pred.point.is_finite());
    assert!(pred.posterior.is_some());
}

#[test]
fn constant_series_posterior_concentrates() {
    // Degenerate-series oracle: on y ≡ c the trained posterior's mode
    // must come out within 0.05 of c. Trained with the stabilized
    // log-likelihood objective; the raw objective's drift toward c is
    // checked separately below, at the looser tolerance its vanishing
    // gradients warrant.
    let c = 0.5;
    let series = TimeSeries::new("const", vec![c; 200]).unwrap();
    let data = window_pairs(&series, 5).unwrap();
    let cfg = TrainConfig {
        iterations: 2500,
        batch: 16,
        n: 8,
        seed: 11,
        stop_window: 100_000, // exercise the full budget
        gen_loss: GenLoss::LogLikelihood,
        dropout_gen: 0.0,
        ..Default::default()
    };
    let (model, _) = train_mdcgan(&data, &cfg).unwrap();
    let mut rng = Rng::from_seed(2);
    let pred = model.predict(&[c; 5], 50, &mut rng).unwrap();
    assert!(
        (pred.point - c).abs() < 0.05,
        "mode {} vs constant {c}",
        pred.point
    );
}

#[test]
fn constant_series_raw_objective_moves_toward_the_constant() {
    let c = 0.5;
    let series = TimeSeries::new("const", vec![c; 200]).unwrap();
    let data = window_pairs(&series, 5).unwrap();
    let cfg = TrainConfig {
        iterations: 2500,
        batch: 16,
        n: 8,
        seed: 11,
        stop_window: 100_000,
        dropout_gen: 0.0,
        ..Default::default()
    };
    let (model, _) = train_mdcgan(&data, &cfg).unwrap();
    let mut rng = Rng::from_seed(2);
    let pred = model.predict(&[c; 5], 50, &mut rng).unwrap();
    assert!(
        (pred.point - c).abs() < 0.2,
        "mode {} vs constant {c}",
        pred.point
    );
}

#[test]
fn predict_is_deterministic_given_seed() {
    let data = toy_dataset();
    let (model, _) = train_mdcgan(&data, &small_config(30)).unwrap();
    let x = [0.5, 0.6, 0.7, 0.6, 0.5];
    let a = model.predict(&x, 20, &mut Rng::from_seed(9)).unwrap();
    let b = model.predict(&x, 20, &mut Rng::from_seed(9)).unwrap();
    assert_eq!(a.point.to_bits(), b.point.to_bits());
    assert_eq!(a.posterior.unwrap(), b.posterior.unwrap());
}

#[test]
fn single_sample_pooling_is_identity() {
    let data = toy_dataset();
    let (model, _) = train_mdcgan(&data, &small_config(10)).unwrap();
    let x = [0.4, 0.5, 0.6, 0.5, 0.4];
    let pred = model.predict(&x, 1, &mut Rng::from_seed(3)).unwrap();
    let posterior = pred.posterior.unwrap();
    // One m=1 posterior pooled with weight 1.
    assert_eq!(posterior.component_count(), 1);
    assert_eq!(pred.point, posterior.mu[0]);
}

#[test]
fn same_seed_trains_identical_models() {
    let data = toy_dataset();
    let cfg = small_config(25);
    let (a, _) = train_mdcgan(&data, &cfg).unwrap();
    let (b, _) = train_mdcgan(&data, &cfg).unwrap();
    let ga = a.generator().unwrap();
    let gb = b.generator().unwrap();
    assert_eq!(network_params(ga), network_params(gb));
    let da = a.discriminator().unwrap();
    let db = b.discriminator().unwrap();
    assert_eq!(network_params(da), network_params(db));
}

#[test]
fn divergence_reports_iteration() {
    let data = toy_dataset();
    let cfg = TrainConfig {
        lr: 1e120, // drive the parameters out of range immediately
        ..small_config(50)
    };
    match train_mdcgan(&data, &cfg) {
        Err(ModelError::Diverged { iteration }) => assert!(iteration < 50),
        other => panic!("expected divergence, got {other:?}"),
    }
}

#[test]
fn literal_contract_trains_without_discriminator() {
    let data = toy_dataset();
    let cfg = TrainConfig {
        disc_contract: DiscContract::Literal,
        ..small_config(20)
    };
    let (model, curve) = train_mdcgan(&data, &cfg).unwrap();
    assert!(model.discriminator().is_none());
    assert_eq!(model.meta.disc_adam_steps, 0);
    // The literal loss is still evaluated and finite.
    assert!(curve.iter().all(|r| r.disc_loss.unwrap().is_finite()));
}

#[test]
fn coupled_generator_mode_runs() {
    let data = toy_dataset();
    let cfg = TrainConfig {
        coupled_generator: true,
        ..small_config(15)
    };
    let (model, curve) = train_mdcgan(&data, &cfg).unwrap();
    assert_eq!(curve.len(), 15);
    assert_eq!(model.meta.coupled_generator, Some(true));
}

#[test]
fn sigma_a_from_data_is_the_target_std() {
    let data = toy_dataset();
    let cfg = TrainConfig {
        sigma_a: SigmaA::FromData,
        ..small_config(2)
    };
    let (model, _) = train_mdcgan(&data, &cfg).unwrap();
    let expected = population_variance(&data.targets).sqrt();
    assert!((model.meta.sigma_a_used.unwrap() - expected).abs() < 1e-12);
}

#[test]
fn cgan_trains_and_predicts() {
    let data = toy_dataset();
    let cfg = small_config(40);
    let (model, curve) = train_cgan(&data, &cfg).unwrap();
    assert_eq!(curve.len(), 40);
    assert_eq!(model.kind, ModelKind::Cgan);
    let mut rng = Rng::from_seed(5);
    let pred = model.predict(&[0.5; 5], 16, &mut rng).unwrap();
    assert!(pred.point.is_finite());
    assert!(pred.posterior.is_none());
}
