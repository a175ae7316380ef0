//! Shared training-loop plumbing: minibatch sampling, saturation
//! stopping and loss curves.

use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::data::WindowedDataset;
use crate::numeric::{Matrix, Rng};

/// One (x, y) minibatch drawn uniformly with replacement.
pub(crate) fn sample_batch(
    data: &WindowedDataset,
    batch: usize,
    rng: &mut Rng,
) -> Result<(Matrix, Vec<f64>), ModelError> {
    if data.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let mut x = Matrix::zeros(batch, data.k);
    let mut y = Vec::with_capacity(batch);
    for b in 0..batch {
        let idx = rng.next_below(data.len());
        x.row_mut(b).copy_from_slice(&data.inputs[idx]);
        y.push(data.targets[idx]);
    }
    Ok((x, y))
}

/// A matrix of i.i.d. N(0, variance) noise rows.
pub(crate) fn noise_batch(rows: usize, z_dim: usize, variance: f64, rng: &mut Rng) -> Matrix {
    let std = variance.max(0.0).sqrt();
    let mut z = Matrix::zeros(rows, z_dim);
    rng.fill_normal(z.data_mut(), 0.0, std);
    z
}

/// Saturation stopping on a noisy error signal: tracks the trailing
/// `window` mean and stops once it has gone a full window of pushes
/// without improving the best mean seen so far by at least `rel_tol`
/// (relative).
pub(crate) struct SaturationMonitor {
    window: usize,
    rel_tol: f64,
    ring: std::collections::VecDeque<f64>,
    rolling_sum: f64,
    best: f64,
    stale: usize,
}

impl SaturationMonitor {
    pub fn new(window: usize, rel_tol: f64) -> Self {
        Self {
            window,
            rel_tol,
            ring: std::collections::VecDeque::with_capacity(window + 1),
            rolling_sum: 0.0,
            best: f64::INFINITY,
            stale: 0,
        }
    }

    pub fn push(&mut self, value: f64) -> bool {
        self.ring.push_back(value);
        self.rolling_sum += value;
        if self.ring.len() > self.window {
            self.rolling_sum -= self.ring.pop_front().expect("non-empty ring");
        }
        if self.ring.len() < self.window {
            return false;
        }
        let trailing = self.rolling_sum / self.window as f64;
        if self.best.is_infinite() {
            self.best = trailing;
            return false;
        }
        let margin = self.rel_tol * self.best.abs().max(1e-300);
        if trailing < self.best - margin {
            self.best = trailing;
            self.stale = 0;
        } else {
            self.stale += 1;
        }
        self.stale >= self.window
    }
}

/// Per-iteration losses recorded during training, one row per iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Objective of the model's own update (generator loss for the GANs).
    pub loss: f64,
    /// Discriminator loss where one exists.
    pub disc_loss: Option<f64>,
    /// Point-forecast mean squared error of the training batch.
    pub sample_mse: f64,
}

pub type TrainingCurve = Vec<IterationRecord>;
