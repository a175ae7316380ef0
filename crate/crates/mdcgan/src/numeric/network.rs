//! An ordered layer stack with a train/eval mode switch.

use serde::{Deserialize, Serialize};

use super::{Layer, Matrix, NumericError, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Train,
    Eval,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Network {
    layers: Vec<Layer>,
    input_width: usize,
    output_width: usize,
    mode: Mode,
    #[serde(skip)]
    last_batch: Option<usize>,
}

impl Network {
    /// Validates that adjacent layer widths compose.
    pub fn new(input_width: usize, layers: Vec<Layer>) -> Result<Self, NumericError> {
        let mut width = input_width;
        for layer in &layers {
            width = layer.out_width(width)?;
        }
        Ok(Self {
            layers,
            input_width,
            output_width: width,
            mode: Mode::Train,
            last_batch: None,
        })
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn output_width(&self) -> usize {
        self.output_width
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn set_mode(&mut self, mode: Mode) {
        self.mode = mode;
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    /// Forward pass in the current mode, caching per-layer intermediates
    /// for a subsequent `backward`. Dropout consumes `rng` only in train
    /// mode; train-mode batch norm updates its running statistics.
    pub fn forward(&mut self, x: &Matrix, rng: &mut Rng) -> Result<Matrix, NumericError> {
        if x.cols() != self.input_width {
            return Err(NumericError::DimMismatch {
                op: "network forward",
                expected: (x.rows(), self.input_width),
                got: x.shape(),
            });
        }
        let mode = self.mode;
        let mut cur = x.clone();
        for layer in &mut self.layers {
            cur = layer.forward(&cur, mode, rng)?;
        }
        cur.ensure_finite("network forward")?;
        self.last_batch = Some(x.rows());
        Ok(cur)
    }

    /// Eval-semantics forward with no caching and no state mutation.
    pub fn infer(&self, x: &Matrix) -> Result<Matrix, NumericError> {
        if x.cols() != self.input_width {
            return Err(NumericError::DimMismatch {
                op: "network infer",
                expected: (x.rows(), self.input_width),
                got: x.shape(),
            });
        }
        let mut cur = x.clone();
        for layer in &self.layers {
            cur = layer.infer(&cur)?;
        }
        cur.ensure_finite("network infer")?;
        Ok(cur)
    }

    /// Fills every layer's gradients with ∂loss/∂param and returns
    /// ∂loss/∂input. Parameters are not touched. Requires a preceding
    /// forward pass in the same mode.
    pub fn backward(&mut self, upstream: &Matrix) -> Result<Matrix, NumericError> {
        let batch = self.last_batch.ok_or(NumericError::BackwardBeforeForward)?;
        if upstream.rows() != batch || upstream.cols() != self.output_width {
            return Err(NumericError::DimMismatch {
                op: "network backward",
                expected: (batch, self.output_width),
                got: upstream.shape(),
            });
        }
        let mut grad = upstream.clone();
        for layer in self.layers.iter_mut().rev() {
            grad = layer.backward(&grad)?;
        }
        Ok(grad)
    }

    /// All (param, grad) tensor pairs across layers, in a fixed order.
    pub fn param_tensors(&mut self) -> Vec<(&mut Matrix, &Matrix)> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.params_and_grads())
            .collect()
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .flat_map(|l| l.state_tensors())
            .filter(|(name, _)| !name.starts_with("running"))
            .map(|(_, t)| t.data().len())
            .sum()
    }

    /// True if any dropout layer would be active in the current mode.
    pub fn has_active_dropout(&self) -> bool {
        self.mode == Mode::Train && self.layers.iter().any(|l| l.is_dropout_with_rate())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{Dense, Dropout, LeakyRelu};

    fn identity_dense(width: usize) -> Dense {
        let mut rng = Rng::from_seed(0);
        let mut d = Dense::new(width, width, &mut rng).unwrap();
        for r in 0..width {
            for c in 0..width {
                d.weight.set(r, c, if r == c { 1.0 } else { 0.0 });
            }
        }
        d
    }

    #[test]
    fn identity_dense_passes_input_through() {
        let mut net = Network::new(2, vec![Layer::Dense(identity_dense(2))]).unwrap();
        let mut rng = Rng::from_seed(1);
        let x = Matrix::row_vector(&[1.0, 2.0]).unwrap();
        let y = net.forward(&x, &mut rng).unwrap();
        assert_eq!(y.data(), &[1.0, 2.0]);
    }

    #[test]
    fn leaky_relu_forward_values() {
        // slope 0.2 maps [-1, 3] to [-0.2, 3]
        let mut net = Network::new(2, vec![Layer::LeakyRelu(LeakyRelu::new(0.2).unwrap())]).unwrap();
        let mut rng = Rng::from_seed(1);
        let x = Matrix::row_vector(&[-1.0, 3.0]).unwrap();
        let y = net.forward(&x, &mut rng).unwrap();
        assert!((y.get(0, 0) + 0.2).abs() < 1e-15);
        assert!((y.get(0, 1) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn dropout_eval_is_exact_identity() {
        let mut net = Network::new(3, vec![Layer::Dropout(Dropout::new(0.5).unwrap())]).unwrap();
        net.set_mode(Mode::Eval);
        let mut rng = Rng::from_seed(1);
        let x = Matrix::row_vector(&[0.3, -4.0, 7.5]).unwrap();
        let y = net.forward(&x, &mut rng).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn dense_backward_linear_chain_rule() {
        // Dense(1→1), loss = output: grad_w = x, grad_b = 1.
        let mut rng = Rng::from_seed(2);
        let dense = Dense::new(1, 1, &mut rng).unwrap();
        let mut net = Network::new(1, vec![Layer::Dense(dense)]).unwrap();
        let x = Matrix::row_vector(&[3.5]).unwrap();
        net.forward(&x, &mut rng).unwrap();
        net.backward(&Matrix::row_vector(&[1.0]).unwrap()).unwrap();
        match &net.layers()[0] {
            Layer::Dense(d) => {
                assert!((d.grad_weight.get(0, 0) - 3.5).abs() < 1e-15);
                assert!((d.grad_bias.get(0, 0) - 1.0).abs() < 1e-15);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn leaky_backward_slope_on_negative_side() {
        let mut net = Network::new(1, vec![Layer::LeakyRelu(LeakyRelu::new(0.2).unwrap())]).unwrap();
        let mut rng = Rng::from_seed(1);
        let x = Matrix::row_vector(&[-2.0]).unwrap();
        net.forward(&x, &mut rng).unwrap();
        let g = net.backward(&Matrix::row_vector(&[1.0]).unwrap()).unwrap();
        assert!((g.get(0, 0) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn backward_before_forward_is_an_error() {
        let mut net = Network::new(1, vec![Layer::LeakyRelu(LeakyRelu::new(0.2).unwrap())]).unwrap();
        let up = Matrix::row_vector(&[1.0]).unwrap();
        assert!(matches!(
            net.backward(&up),
            Err(NumericError::BackwardBeforeForward)
        ));
    }

    #[test]
    fn composition_mismatch_rejected() {
        let mut rng = Rng::from_seed(0);
        let a = Dense::new(2, 3, &mut rng).unwrap();
        let b = Dense::new(4, 1, &mut rng).unwrap();
        assert!(Network::new(2, vec![Layer::Dense(a), Layer::Dense(b)]).is_err());
    }

    #[test]
    fn forward_rejects_wrong_input_width() {
        let mut rng = Rng::from_seed(0);
        let d = Dense::new(3, 2, &mut rng).unwrap();
        let mut net = Network::new(3, vec![Layer::Dense(d)]).unwrap();
        let x = Matrix::row_vector(&[1.0, 2.0]).unwrap();
        assert!(net.forward(&x, &mut rng).is_err());
    }
}
