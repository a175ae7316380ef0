//! The five layer kinds: dense affine, leaky ReLU, inverted dropout,
//! batch normalization and the logistic squash.
//!
//! Each layer caches what its own backward pass needs during forward and
//! overwrites its gradient buffers on every backward pass.

use serde::{Deserialize, Serialize};

use super::{Matrix, Mode, NumericError, Rng};

const BN_EPS: f64 = 1e-5;
const BN_MOMENTUM: f64 = 0.99;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dense {
    pub weight: Matrix, // in × out
    pub bias: Matrix,   // 1 × out
    #[serde(skip)]
    pub grad_weight: Matrix,
    #[serde(skip)]
    pub grad_bias: Matrix,
    #[serde(skip)]
    cached_input: Option<Matrix>,
}

impl Dense {
    /// Glorot-uniform weights in ±√(6/(fan_in+fan_out)), zero biases.
    pub fn new(in_width: usize, out_width: usize, rng: &mut Rng) -> Result<Self, NumericError> {
        if in_width == 0 || out_width == 0 {
            return Err(NumericError::InvalidLayer(
                "dense widths must be positive".into(),
            ));
        }
        let limit = (6.0 / (in_width + out_width) as f64).sqrt();
        let mut weight = Matrix::zeros(in_width, out_width);
        for w in weight.data_mut() {
            *w = rng.uniform_in(-limit, limit);
        }
        Ok(Self {
            weight,
            bias: Matrix::zeros(1, out_width),
            grad_weight: Matrix::zeros(in_width, out_width),
            grad_bias: Matrix::zeros(1, out_width),
            cached_input: None,
        })
    }

    pub fn in_width(&self) -> usize {
        self.weight.rows()
    }

    pub fn out_width(&self) -> usize {
        self.weight.cols()
    }

    fn forward(&mut self, x: &Matrix) -> Result<Matrix, NumericError> {
        let out = x.matmul(&self.weight)?.add_row_broadcast(&self.bias)?;
        self.cached_input = Some(x.clone());
        Ok(out)
    }

    fn backward(&mut self, upstream: &Matrix) -> Result<Matrix, NumericError> {
        let x = self
            .cached_input
            .as_ref()
            .ok_or(NumericError::BackwardBeforeForward)?;
        self.grad_weight = x.transpose().matmul(upstream)?;
        self.grad_bias = upstream.col_sum();
        upstream.matmul(&self.weight.transpose())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LeakyRelu {
    pub slope: f64,
    #[serde(skip)]
    cached_input: Option<Matrix>,
}

impl LeakyRelu {
    pub fn new(slope: f64) -> Result<Self, NumericError> {
        if !(slope > 0.0) {
            return Err(NumericError::InvalidLayer(format!(
                "leaky ReLU slope must be > 0, got {slope}"
            )));
        }
        Ok(Self {
            slope,
            cached_input: None,
        })
    }

    fn forward(&mut self, x: &Matrix) -> Result<Matrix, NumericError> {
        let slope = self.slope;
        let out = x.map(|v| if v > 0.0 { v } else { slope * v });
        self.cached_input = Some(x.clone());
        Ok(out)
    }

    fn backward(&mut self, upstream: &Matrix) -> Result<Matrix, NumericError> {
        let x = self
            .cached_input
            .as_ref()
            .ok_or(NumericError::BackwardBeforeForward)?;
        if x.shape() != upstream.shape() {
            return Err(NumericError::DimMismatch {
                op: "leaky_relu backward",
                expected: x.shape(),
                got: upstream.shape(),
            });
        }
        let slope = self.slope;
        let mut out = upstream.clone();
        for (g, &v) in out.data_mut().iter_mut().zip(x.data()) {
            if v <= 0.0 {
                *g *= slope;
            }
        }
        Ok(out)
    }
}

/// Inverted dropout: surviving activations are scaled by 1/(1-rate) at
/// train time so eval mode is the identity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dropout {
    pub rate: f64,
    #[serde(skip)]
    cached_mask: Option<Matrix>, // None means the last forward was identity
}

impl Dropout {
    pub fn new(rate: f64) -> Result<Self, NumericError> {
        if !(0.0..1.0).contains(&rate) {
            return Err(NumericError::InvalidLayer(format!(
                "dropout rate must be in [0,1), got {rate}"
            )));
        }
        Ok(Self {
            rate,
            cached_mask: None,
        })
    }

    fn forward(&mut self, x: &Matrix, mode: Mode, rng: &mut Rng) -> Result<Matrix, NumericError> {
        if mode == Mode::Eval || self.rate == 0.0 {
            self.cached_mask = None;
            return Ok(x.clone());
        }
        let keep_scale = 1.0 / (1.0 - self.rate);
        let mut mask = Matrix::zeros(x.rows(), x.cols());
        for m in mask.data_mut() {
            if rng.next_uniform() >= self.rate {
                *m = keep_scale;
            }
        }
        let out = x.hadamard(&mask)?;
        self.cached_mask = Some(mask);
        Ok(out)
    }

    fn backward(&mut self, upstream: &Matrix) -> Result<Matrix, NumericError> {
        match &self.cached_mask {
            None => Ok(upstream.clone()),
            Some(mask) => upstream.hadamard(mask),
        }
    }
}

#[derive(Debug, Clone)]
struct BnCache {
    x_hat: Matrix,
    inv_std: Matrix, // 1 × width, 1/√(var+ε) actually used to normalize
    train_stats: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BatchNorm {
    pub gamma: Matrix, // 1 × width
    pub beta: Matrix,  // 1 × width
    pub running_mean: Matrix,
    pub running_var: Matrix,
    #[serde(skip)]
    pub grad_gamma: Matrix,
    #[serde(skip)]
    pub grad_beta: Matrix,
    #[serde(skip)]
    cache: Option<BnCache>,
}

impl BatchNorm {
    pub fn new(width: usize) -> Result<Self, NumericError> {
        if width == 0 {
            return Err(NumericError::InvalidLayer(
                "batch norm width must be positive".into(),
            ));
        }
        Ok(Self {
            gamma: Matrix::filled(1, width, 1.0),
            beta: Matrix::zeros(1, width),
            running_mean: Matrix::zeros(1, width),
            running_var: Matrix::filled(1, width, 1.0),
            grad_gamma: Matrix::zeros(1, width),
            grad_beta: Matrix::zeros(1, width),
            cache: None,
        })
    }

    pub fn width(&self) -> usize {
        self.gamma.cols()
    }

    fn forward(&mut self, x: &Matrix, mode: Mode) -> Result<Matrix, NumericError> {
        if x.cols() != self.width() {
            return Err(NumericError::DimMismatch {
                op: "batch_norm forward",
                expected: (x.rows(), self.width()),
                got: x.shape(),
            });
        }
        let (mean, var, train_stats) = match mode {
            Mode::Train => {
                if x.rows() < 2 {
                    return Err(NumericError::BatchTooSmall { got: x.rows() });
                }
                let mean = x.col_mean();
                // Biased (1/N) variance, both for normalization and for the
                // running estimate.
                let mut var = Matrix::zeros(1, x.cols());
                for r in 0..x.rows() {
                    for (c, &v) in x.row(r).iter().enumerate() {
                        let d = v - mean.get(0, c);
                        var.set(0, c, var.get(0, c) + d * d);
                    }
                }
                let var = var.map(|v| v / x.rows() as f64);
                for c in 0..x.cols() {
                    let rm = BN_MOMENTUM * self.running_mean.get(0, c)
                        + (1.0 - BN_MOMENTUM) * mean.get(0, c);
                    let rv = BN_MOMENTUM * self.running_var.get(0, c)
                        + (1.0 - BN_MOMENTUM) * var.get(0, c);
                    self.running_mean.set(0, c, rm);
                    self.running_var.set(0, c, rv);
                }
                (mean, var, true)
            }
            Mode::Eval => (self.running_mean.clone(), self.running_var.clone(), false),
        };

        let inv_std = var.map(|v| 1.0 / (v + BN_EPS).sqrt());
        let mut x_hat = x.clone();
        for r in 0..x_hat.rows() {
            for c in 0..x_hat.cols() {
                let v = (x_hat.get(r, c) - mean.get(0, c)) * inv_std.get(0, c);
                x_hat.set(r, c, v);
            }
        }
        x_hat.ensure_finite("batch_norm forward")?;

        let mut out = x_hat.clone();
        for r in 0..out.rows() {
            for c in 0..out.cols() {
                out.set(r, c, out.get(r, c) * self.gamma.get(0, c) + self.beta.get(0, c));
            }
        }
        self.cache = Some(BnCache {
            x_hat,
            inv_std,
            train_stats,
        });
        Ok(out)
    }

    fn backward(&mut self, upstream: &Matrix) -> Result<Matrix, NumericError> {
        let cache = self
            .cache
            .as_ref()
            .ok_or(NumericError::BackwardBeforeForward)?;
        let x_hat = &cache.x_hat;
        if upstream.shape() != x_hat.shape() {
            return Err(NumericError::DimMismatch {
                op: "batch_norm backward",
                expected: x_hat.shape(),
                got: upstream.shape(),
            });
        }
        self.grad_beta = upstream.col_sum();
        self.grad_gamma = upstream.hadamard(x_hat)?.col_sum();

        let n = upstream.rows() as f64;
        let mut out = Matrix::zeros(upstream.rows(), upstream.cols());
        if cache.train_stats {
            // d_xhat = upstream ∘ gamma; dx folds in the batch mean and
            // variance paths:
            //   dx = inv_std/N * (N*d_xhat - Σ d_xhat - x_hat * Σ(d_xhat ∘ x_hat))
            let mut sum_dxh = vec![0.0; upstream.cols()];
            let mut sum_dxh_xh = vec![0.0; upstream.cols()];
            for r in 0..upstream.rows() {
                for c in 0..upstream.cols() {
                    let dxh = upstream.get(r, c) * self.gamma.get(0, c);
                    sum_dxh[c] += dxh;
                    sum_dxh_xh[c] += dxh * x_hat.get(r, c);
                }
            }
            for r in 0..upstream.rows() {
                for c in 0..upstream.cols() {
                    let dxh = upstream.get(r, c) * self.gamma.get(0, c);
                    let v = cache.inv_std.get(0, c) / n
                        * (n * dxh - sum_dxh[c] - x_hat.get(r, c) * sum_dxh_xh[c]);
                    out.set(r, c, v);
                }
            }
        } else {
            // Eval statistics are constants, so the map is affine per column.
            for r in 0..upstream.rows() {
                for c in 0..upstream.cols() {
                    let v = upstream.get(r, c) * self.gamma.get(0, c) * cache.inv_std.get(0, c);
                    out.set(r, c, v);
                }
            }
        }
        out.ensure_finite("batch_norm backward")?;
        Ok(out)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sigmoid {
    #[serde(skip)]
    cached_output: Option<Matrix>,
}

impl Sigmoid {
    pub fn new() -> Self {
        Self {
            cached_output: None,
        }
    }

    fn forward(&mut self, x: &Matrix) -> Result<Matrix, NumericError> {
        let out = x.map(|v| 1.0 / (1.0 + (-v).exp()));
        self.cached_output = Some(out.clone());
        Ok(out)
    }

    fn backward(&mut self, upstream: &Matrix) -> Result<Matrix, NumericError> {
        let y = self
            .cached_output
            .as_ref()
            .ok_or(NumericError::BackwardBeforeForward)?;
        let deriv = y.map(|v| v * (1.0 - v));
        upstream.hadamard(&deriv)
    }
}

impl Default for Sigmoid {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Layer {
    Dense(Dense),
    LeakyRelu(LeakyRelu),
    Dropout(Dropout),
    BatchNorm(BatchNorm),
    Sigmoid(Sigmoid),
}

impl Layer {
    pub fn forward(
        &mut self,
        x: &Matrix,
        mode: Mode,
        rng: &mut Rng,
    ) -> Result<Matrix, NumericError> {
        match self {
            Layer::Dense(l) => l.forward(x),
            Layer::LeakyRelu(l) => l.forward(x),
            Layer::Dropout(l) => l.forward(x, mode, rng),
            Layer::BatchNorm(l) => l.forward(x, mode),
            Layer::Sigmoid(l) => l.forward(x),
        }
    }

    /// Pure eval-mode forward: no caches, no rng, no running-stat updates.
    pub fn infer(&self, x: &Matrix) -> Result<Matrix, NumericError> {
        match self {
            Layer::Dense(l) => x.matmul(&l.weight)?.add_row_broadcast(&l.bias),
            Layer::LeakyRelu(l) => {
                let slope = l.slope;
                Ok(x.map(|v| if v > 0.0 { v } else { slope * v }))
            }
            Layer::Dropout(_) => Ok(x.clone()),
            Layer::BatchNorm(l) => {
                let mut out = x.clone();
                for r in 0..out.rows() {
                    for c in 0..out.cols() {
                        let inv = 1.0 / (l.running_var.get(0, c) + BN_EPS).sqrt();
                        let v = (out.get(r, c) - l.running_mean.get(0, c)) * inv
                            * l.gamma.get(0, c)
                            + l.beta.get(0, c);
                        out.set(r, c, v);
                    }
                }
                out.ensure_finite("batch_norm infer")?;
                Ok(out)
            }
            Layer::Sigmoid(_) => Ok(x.map(|v| 1.0 / (1.0 + (-v).exp()))),
        }
    }

    pub fn backward(&mut self, upstream: &Matrix) -> Result<Matrix, NumericError> {
        match self {
            Layer::Dense(l) => l.backward(upstream),
            Layer::LeakyRelu(l) => l.backward(upstream),
            Layer::Dropout(l) => l.backward(upstream),
            Layer::BatchNorm(l) => l.backward(upstream),
            Layer::Sigmoid(l) => l.backward(upstream),
        }
    }

    /// (param, grad) pairs; grads are valid after a backward pass.
    pub fn params_and_grads(&mut self) -> Vec<(&mut Matrix, &Matrix)> {
        match self {
            Layer::Dense(l) => vec![
                (&mut l.weight, &l.grad_weight),
                (&mut l.bias, &l.grad_bias),
            ],
            Layer::BatchNorm(l) => vec![
                (&mut l.gamma, &l.grad_gamma),
                (&mut l.beta, &l.grad_beta),
            ],
            _ => Vec::new(),
        }
    }

    /// Named tensors for checkpoints, including non-trained state.
    pub fn state_tensors(&self) -> Vec<(&'static str, &Matrix)> {
        match self {
            Layer::Dense(l) => vec![("weight", &l.weight), ("bias", &l.bias)],
            Layer::BatchNorm(l) => vec![
                ("gamma", &l.gamma),
                ("beta", &l.beta),
                ("running_mean", &l.running_mean),
                ("running_var", &l.running_var),
            ],
            _ => Vec::new(),
        }
    }

    pub fn is_dropout_with_rate(&self) -> bool {
        matches!(self, Layer::Dropout(d) if d.rate > 0.0)
    }

    /// Output width if this layer changes it, given the input width.
    pub fn out_width(&self, in_width: usize) -> Result<usize, NumericError> {
        match self {
            Layer::Dense(l) => {
                if l.in_width() != in_width {
                    return Err(NumericError::DimMismatch {
                        op: "layer composition",
                        expected: (l.in_width(), l.out_width()),
                        got: (in_width, 0),
                    });
                }
                Ok(l.out_width())
            }
            Layer::BatchNorm(l) => {
                if l.width() != in_width {
                    return Err(NumericError::DimMismatch {
                        op: "layer composition",
                        expected: (1, l.width()),
                        got: (1, in_width),
                    });
                }
                Ok(in_width)
            }
            _ => Ok(in_width),
        }
    }
}
