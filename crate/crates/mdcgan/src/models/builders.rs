//! Shared network topologies: every learned model uses the same stack,
//! with input and output widths depending on the model.
//!
//! Generator-style nets (also used by the SNN and MDN): three blocks of
//! dense widths n, 2n, 4n, each followed by leaky ReLU, dropout and batch
//! normalization, then a final linear map. Discriminators: three blocks
//! of dense width 2n with leaky ReLU and dropout (no batch norm), then a
//! final linear map, optionally squashed through a logistic output.

use super::{ModelError, TrainConfig};
use crate::numeric::{BatchNorm, Dense, Dropout, Layer, LeakyRelu, Network, Rng, Sigmoid};

pub fn build_generator(
    cfg: &TrainConfig,
    input_width: usize,
    output_width: usize,
    rng: &mut Rng,
) -> Result<Network, ModelError> {
    if input_width == 0 || output_width == 0 {
        return Err(ModelError::InvalidConfig(
            "generator widths must be positive".into(),
        ));
    }
    let mut layers = Vec::new();
    let mut width = input_width;
    for factor in [1, 2, 4] {
        let out = factor * cfg.n;
        layers.push(Layer::Dense(Dense::new(width, out, rng)?));
        layers.push(Layer::LeakyRelu(LeakyRelu::new(cfg.leaky_slope)?));
        layers.push(Layer::Dropout(Dropout::new(cfg.dropout_gen)?));
        layers.push(Layer::BatchNorm(BatchNorm::new(out)?));
        width = out;
    }
    layers.push(Layer::Dense(Dense::new(width, output_width, rng)?));
    Ok(Network::new(input_width, layers)?)
}

pub fn build_discriminator(
    cfg: &TrainConfig,
    input_width: usize,
    output_width: usize,
    logistic_output: bool,
    rng: &mut Rng,
) -> Result<Network, ModelError> {
    if input_width == 0 || output_width == 0 {
        return Err(ModelError::InvalidConfig(
            "discriminator widths must be positive".into(),
        ));
    }
    let mut layers = Vec::new();
    let mut width = input_width;
    for _ in 0..3 {
        let out = 2 * cfg.n;
        layers.push(Layer::Dense(Dense::new(width, out, rng)?));
        layers.push(Layer::LeakyRelu(LeakyRelu::new(cfg.leaky_slope)?));
        layers.push(Layer::Dropout(Dropout::new(cfg.dropout_disc)?));
        width = out;
    }
    layers.push(Layer::Dense(Dense::new(width, output_width, rng)?));
    if logistic_output {
        layers.push(Layer::Sigmoid(Sigmoid::new()));
    }
    Ok(Network::new(input_width, layers)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_widths(net: &Network) -> Vec<(usize, usize)> {
        net.layers()
            .iter()
            .filter_map(|l| match l {
                Layer::Dense(d) => Some((d.in_width(), d.out_width())),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn generator_default_widths() {
        let cfg = TrainConfig::default();
        let mut rng = Rng::from_seed(1);
        // Conditional generator with m = 1: k + z_dim in, 3 latents out.
        let g = build_generator(&cfg, cfg.k + cfg.z_dim, 3 * cfg.m, &mut rng).unwrap();
        assert_eq!(dense_widths(&g), vec![(10, 20), (20, 40), (40, 80), (80, 3)]);
        assert_eq!(g.input_width(), 10);
        assert_eq!(g.output_width(), 3);
    }

    #[test]
    fn snn_widths() {
        let cfg = TrainConfig::default();
        let mut rng = Rng::from_seed(1);
        let g = build_generator(&cfg, cfg.k, 1, &mut rng).unwrap();
        assert_eq!(dense_widths(&g), vec![(5, 20), (20, 40), (40, 80), (80, 1)]);
    }

    #[test]
    fn m3_generator_output_width() {
        let cfg = TrainConfig {
            m: 3,
            ..Default::default()
        };
        let mut rng = Rng::from_seed(1);
        let g = build_generator(&cfg, cfg.k + cfg.z_dim, 3 * cfg.m, &mut rng).unwrap();
        assert_eq!(g.output_width(), 9);
    }

    #[test]
    fn cgan_discriminator_widths() {
        let cfg = TrainConfig::default();
        let mut rng = Rng::from_seed(1);
        let d = build_discriminator(&cfg, cfg.k + 1, 1, true, &mut rng).unwrap();
        assert_eq!(dense_widths(&d), vec![(6, 40), (40, 40), (40, 40), (40, 1)]);
        assert!(matches!(d.layers().last(), Some(Layer::Sigmoid(_))));
        // No batch norm anywhere in a discriminator.
        assert!(!d.layers().iter().any(|l| matches!(l, Layer::BatchNorm(_))));
    }

    #[test]
    fn mdcgan_discriminator_is_vector_valued() {
        let cfg = TrainConfig::default();
        let mut rng = Rng::from_seed(1);
        let d = build_discriminator(&cfg, cfg.k, cfg.k, false, &mut rng).unwrap();
        assert_eq!(dense_widths(&d), vec![(5, 40), (40, 40), (40, 40), (40, 5)]);
        assert!(!matches!(d.layers().last(), Some(Layer::Sigmoid(_))));
    }

    #[test]
    fn hidden_widths_scale_with_n() {
        let cfg = TrainConfig {
            n: 10,
            ..Default::default()
        };
        let mut rng = Rng::from_seed(1);
        let d = build_discriminator(&cfg, 5, 5, false, &mut rng).unwrap();
        assert_eq!(dense_widths(&d), vec![(5, 20), (20, 20), (20, 20), (20, 5)]);
    }

    #[test]
    fn generator_block_order_is_dense_relu_dropout_batchnorm() {
        let cfg = TrainConfig::default();
        let mut rng = Rng::from_seed(1);
        let g = build_generator(&cfg, 10, 3, &mut rng).unwrap();
        let kinds: Vec<&'static str> = g
            .layers()
            .iter()
            .map(|l| match l {
                Layer::Dense(_) => "dense",
                Layer::LeakyRelu(_) => "leaky",
                Layer::Dropout(_) => "dropout",
                Layer::BatchNorm(_) => "bn",
                Layer::Sigmoid(_) => "sigmoid",
            })
            .collect();
        assert_eq!(
            kinds,
            vec![
                "dense", "leaky", "dropout", "bn", "dense", "leaky", "dropout", "bn", "dense",
                "leaky", "dropout", "bn", "dense"
            ]
        );
    }
}
