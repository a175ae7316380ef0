//! Training objectives and their gradients with respect to network
//! outputs. Mixture losses operate on latent rows laid out as
//! [s_alpha | s_sigma | s_mu] and return upstream gradient matrices
//! ready for `Network::backward`.

use crate::mixture::{map_latents, GmmParams, LatentTriple, SIGMA_FLOOR};
use crate::numeric::{log_sum_exp, Matrix};

use super::ModelError;

const LN_2PI: f64 = 1.837877066409345483560659472811;
const BCE_CLAMP: f64 = 1e-12;

/// Mean squared error over an N×1 prediction column; upstream gradient is
/// 2(p−y)/N.
pub fn mse_loss(pred: &Matrix, targets: &[f64]) -> Result<(f64, Matrix), ModelError> {
    check_column(pred, targets.len(), "mse_loss")?;
    let n = targets.len() as f64;
    let mut upstream = Matrix::zeros(targets.len(), 1);
    let mut loss = 0.0;
    for (i, &y) in targets.iter().enumerate() {
        let d = pred.get(i, 0) - y;
        loss += d * d;
        upstream.set(i, 0, 2.0 * d / n);
    }
    Ok((loss / n, upstream))
}

/// Binary cross-entropy over an N×1 probability column, with the usual
/// clamp away from 0 and 1. Gradient is taken at the clamped value.
pub fn bce_loss(probs: &Matrix, labels: &[f64]) -> Result<(f64, Matrix), ModelError> {
    check_column(probs, labels.len(), "bce_loss")?;
    let n = labels.len() as f64;
    let mut upstream = Matrix::zeros(labels.len(), 1);
    let mut loss = 0.0;
    for (i, &t) in labels.iter().enumerate() {
        let p = probs.get(i, 0).clamp(BCE_CLAMP, 1.0 - BCE_CLAMP);
        loss -= t * p.ln() + (1.0 - t) * (1.0 - p).ln();
        upstream.set(i, 0, (p - t) / (p * (1.0 - p)) / n);
    }
    Ok((loss / n, upstream))
}

/// One latent row evaluated against a target: mixture parameters plus the
/// per-component log densities ln(α_i · N(y|μ_i,σ_i)).
pub struct MixtureEval {
    pub params: GmmParams,
    pub log_terms: Vec<f64>,
    pub log_likelihood: f64,
    /// Components whose σ hit the exp-mapping floor; their scale latents
    /// receive zero gradient.
    clamped: Vec<bool>,
}

impl MixtureEval {
    pub fn new(latent_row: &[f64], y: f64) -> Result<Self, ModelError> {
        let triple = LatentTriple::from_flat(latent_row)?;
        let params = map_latents(&triple)?;
        let clamped = triple
            .s_sigma
            .iter()
            .map(|s| s.exp() <= SIGMA_FLOOR)
            .collect();
        let log_terms: Vec<f64> = params
            .alpha
            .iter()
            .zip(&params.sigma)
            .zip(&params.mu)
            .map(|((&a, &s), &m)| {
                let z = (y - m) / s;
                a.ln() - s.ln() - 0.5 * LN_2PI - 0.5 * z * z
            })
            .collect();
        let log_likelihood = log_sum_exp(&log_terms)?;
        Ok(Self {
            params,
            log_terms,
            log_likelihood,
            clamped,
        })
    }

    pub fn likelihood(&self) -> f64 {
        self.log_likelihood.exp()
    }

    /// Gradient of the mixture density p = Σ α_i N(y|μ_i,σ_i) with
    /// respect to the latent row, in the flat layout:
    ///   ∂p/∂s_α,j = α_j (φ_j − p)
    ///   ∂p/∂s_σ,i = α_i φ_i ((y−μ_i)²/σ_i² − 1)
    ///   ∂p/∂s_μ,i = α_i φ_i (y−μ_i)/σ_i²
    /// where φ_i is the component density and α_i φ_i = exp(log_terms_i).
    pub fn density_grad(&self, y: f64) -> Vec<f64> {
        let m = self.params.component_count();
        let p = self.likelihood();
        let mut grad = vec![0.0; 3 * m];
        for i in 0..m {
            let alpha_phi = self.log_terms[i].exp();
            let phi = alpha_phi / self.params.alpha[i];
            let delta = y - self.params.mu[i];
            let s2 = self.params.sigma[i] * self.params.sigma[i];
            grad[i] = self.params.alpha[i] * (phi - p);
            grad[m + i] = if self.clamped[i] {
                0.0
            } else {
                alpha_phi * (delta * delta / s2 - 1.0)
            };
            grad[2 * m + i] = alpha_phi * delta / s2;
        }
        grad
    }

    /// Gradient of −ln p, computed through responsibilities
    /// r_i = exp(log_terms_i − log_likelihood) for stability:
    ///   ∂(−ln p)/∂s_α,j = α_j − r_j
    ///   ∂(−ln p)/∂s_σ,i = r_i (1 − (y−μ_i)²/σ_i²)
    ///   ∂(−ln p)/∂s_μ,i = −r_i (y−μ_i)/σ_i²
    pub fn nll_grad(&self, y: f64) -> Vec<f64> {
        let m = self.params.component_count();
        let mut grad = vec![0.0; 3 * m];
        for i in 0..m {
            let r = (self.log_terms[i] - self.log_likelihood).exp();
            let delta = y - self.params.mu[i];
            let s2 = self.params.sigma[i] * self.params.sigma[i];
            grad[i] = self.params.alpha[i] - r;
            grad[m + i] = if self.clamped[i] {
                0.0
            } else {
                r * (1.0 - delta * delta / s2)
            };
            grad[2 * m + i] = -r * delta / s2;
        }
        grad
    }
}

/// Mean −L over the batch (the raw-likelihood generator objective) and
/// its upstream gradient on the latent matrix.
pub fn mixture_raw_loss(latents: &Matrix, targets: &[f64]) -> Result<(f64, Matrix), ModelError> {
    mixture_loss_impl(latents, targets, false)
}

/// Mean −ln L over the batch (the mixture-density objective) and its
/// upstream gradient on the latent matrix.
pub fn mixture_nll_loss(latents: &Matrix, targets: &[f64]) -> Result<(f64, Matrix), ModelError> {
    mixture_loss_impl(latents, targets, true)
}

fn mixture_loss_impl(
    latents: &Matrix,
    targets: &[f64],
    log_variant: bool,
) -> Result<(f64, Matrix), ModelError> {
    if latents.rows() != targets.len() {
        return Err(ModelError::BatchMismatch {
            op: "mixture loss",
            rows: latents.rows(),
            targets: targets.len(),
        });
    }
    let n = targets.len() as f64;
    let mut upstream = Matrix::zeros(latents.rows(), latents.cols());
    let mut loss = 0.0;
    for (i, &y) in targets.iter().enumerate() {
        let eval = MixtureEval::new(latents.row(i), y)?;
        let grad = if log_variant {
            loss += -eval.log_likelihood;
            eval.nll_grad(y)
        } else {
            loss += -eval.likelihood();
            // d(−p)/ds = −dp/ds
            eval.density_grad(y).iter().map(|g| -g).collect()
        };
        for (c, g) in grad.iter().enumerate() {
            upstream.set(i, c, g / n);
        }
    }
    Ok((loss / n, upstream))
}

/// Maps every latent row of a batch to mixture parameters.
pub fn latent_rows_to_params(latents: &Matrix) -> Result<Vec<GmmParams>, ModelError> {
    (0..latents.rows())
        .map(|i| {
            let triple = LatentTriple::from_flat(latents.row(i))?;
            Ok(map_latents(&triple)?)
        })
        .collect()
}

fn check_column(m: &Matrix, expected_rows: usize, op: &'static str) -> Result<(), ModelError> {
    if m.cols() != 1 || m.rows() != expected_rows {
        return Err(ModelError::BatchMismatch {
            op,
            rows: m.rows(),
            targets: expected_rows,
        });
    }
    Ok(())
}
