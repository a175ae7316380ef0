//! Linear autoregressive baselines fitted by ordinary least squares.

use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::data::TimeSeries;
use crate::numeric::Matrix;

/// AR(p) with an intercept: ŷ_t = c_0 + Σ_j c_j · y_{t−j}.
/// AR(0) stores no coefficients and forecasts the previous observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArModel {
    pub order: usize,
    /// Empty for AR(0); otherwise [intercept, lag 1, ..., lag p].
    pub coefficients: Vec<f64>,
}

impl ArModel {
    /// Forecast from the trailing values of `window` (most recent last).
    pub fn predict(&self, window: &[f64]) -> Result<f64, ModelError> {
        if window.len() < self.order.max(1) {
            return Err(ModelError::WindowTooShort {
                got: window.len(),
                needed: self.order.max(1),
            });
        }
        if self.order == 0 {
            return Ok(*window.last().expect("non-empty window"));
        }
        let mut acc = self.coefficients[0];
        for j in 1..=self.order {
            acc += self.coefficients[j] * window[window.len() - j];
        }
        Ok(acc)
    }
}

/// Fits an AR(p) and wraps it in the common forecaster interface.
pub fn train_ar(
    series: &TimeSeries,
    order: usize,
    cfg: &super::TrainConfig,
) -> Result<super::Forecaster, ModelError> {
    let model = fit_ar(series, order)?;
    Ok(super::Forecaster {
        kind: super::ModelKind::Ar(order),
        config: cfg.clone(),
        meta: super::TrainMeta {
            seed: cfg.seed,
            ..Default::default()
        },
        inner: super::forecaster::ForecasterInner::Linear { model },
    })
}

/// Least-squares fit over the lag matrix. Singular normal equations fall
/// back to the eigendecomposition pseudo-inverse (minimum-norm solution).
pub fn fit_ar(series: &TimeSeries, order: usize) -> Result<ArModel, ModelError> {
    if order == 0 {
        return Ok(ArModel {
            order: 0,
            coefficients: Vec::new(),
        });
    }
    if series.len() < order + 2 {
        return Err(ModelError::SeriesTooShort {
            got: series.len(),
            needed: order + 2,
        });
    }
    let rows = series.len() - order;
    let cols = order + 1;
    let mut design = Matrix::zeros(rows, cols);
    let mut targets = vec![0.0; rows];
    for t in 0..rows {
        design.set(t, 0, 1.0);
        for j in 1..=order {
            design.set(t, j, series.values[t + order - j]);
        }
        targets[t] = series.values[t + order];
    }
    let xtx = design.transpose().matmul(&design)?;
    let mut xty = vec![0.0; cols];
    for (t, &y) in targets.iter().enumerate() {
        for c in 0..cols {
            xty[c] += design.get(t, c) * y;
        }
    }
    let coefficients = match cholesky_solve(&xtx, &xty) {
        Some(c) => c,
        // Reported via the solver enum below; callers see a clean model
        // either way.
        None => pseudo_inverse_solve(&xtx, &xty),
    };
    if coefficients.iter().any(|c| !c.is_finite()) {
        return Err(ModelError::SingularSystem);
    }
    Ok(ArModel {
        order,
        coefficients,
    })
}

/// Cholesky solve of a symmetric positive-definite system; None when a
/// pivot degenerates (singular or indefinite).
fn cholesky_solve(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut l = vec![0.0; n * n];
    let scale = (0..n).map(|i| a.get(i, i).abs()).fold(0.0, f64::max);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a.get(i, j);
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if sum <= 1e-12 * scale.max(1.0) {
                    return None;
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    // Forward then back substitution.
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i * n + k] * y[k];
        }
        y[i] = sum / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in i + 1..n {
            sum -= l[k * n + i] * x[k];
        }
        x[i] = sum / l[i * n + i];
    }
    Some(x)
}

/// Minimum-norm solution via the Jacobi eigendecomposition of the
/// symmetric normal matrix, zeroing eigenvalues below a relative cutoff.
fn pseudo_inverse_solve(a: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let (eigenvalues, vectors) = jacobi_eigen(a);
    let max_ev = eigenvalues.iter().cloned().fold(0.0, f64::max);
    let cutoff = 1e-12 * max_ev.max(1e-300);
    let mut x = vec![0.0; n];
    for (idx, &lambda) in eigenvalues.iter().enumerate() {
        if lambda.abs() <= cutoff {
            continue;
        }
        // projection of b onto eigenvector idx
        let mut dot = 0.0;
        for i in 0..n {
            dot += vectors.get(i, idx) * b[i];
        }
        let scale = dot / lambda;
        for i in 0..n {
            x[i] += scale * vectors.get(i, idx);
        }
    }
    x
}

/// Cyclic Jacobi rotations; fine for the tiny symmetric systems here.
fn jacobi_eigen(a: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.rows();
    let mut m = a.clone();
    let mut v = Matrix::zeros(n, n);
    for i in 0..n {
        v.set(i, i, 1.0);
    }
    for _ in 0..200 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m.get(i, j) * m.get(i, j);
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let mip = m.get(i, p);
                    let miq = m.get(i, q);
                    m.set(i, p, c * mip - s * miq);
                    m.set(i, q, s * mip + c * miq);
                }
                for i in 0..n {
                    let mpi = m.get(p, i);
                    let mqi = m.get(q, i);
                    m.set(p, i, c * mpi - s * mqi);
                    m.set(q, i, s * mpi + c * mqi);
                }
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, c * vip - s * viq);
                    v.set(i, q, s * vip + c * viq);
                }
            }
        }
    }
    let eigenvalues = (0..n).map(|i| m.get(i, i)).collect();
    (eigenvalues, v)
}
