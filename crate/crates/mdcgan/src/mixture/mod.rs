//! Gaussian-mixture predictive posteriors: latent-to-parameter mappings,
//! likelihoods, modes, samples and pooling.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{log_sum_exp, NumericError, Rng};

/// Lower bound applied to standard deviations after the exp mapping.
pub const SIGMA_FLOOR: f64 = 1e-6;

const LN_2PI: f64 = 1.837877066409345483560659472811; // ln(2π)

#[derive(Debug, Error)]
pub enum MixtureError {
    #[error("latent vectors must share a positive length, got ({alpha}, {sigma}, {mu})")]
    LatentLengths { alpha: usize, sigma: usize, mu: usize },
    #[error("non-finite latent value")]
    NonFiniteLatent,
    #[error("invalid mixture parameters: {0}")]
    InvalidParams(String),
    #[error("pool weights must sum to 1 within 1e-9, got {sum}")]
    BadPoolWeights { sum: f64 },
    #[error("pool called with no posteriors")]
    EmptyPool,
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// Raw network outputs before the mixture mapping, in the fixed order
/// (weights, log-scales, means).
#[derive(Debug, Clone, PartialEq)]
pub struct LatentTriple {
    pub s_alpha: Vec<f64>,
    pub s_sigma: Vec<f64>,
    pub s_mu: Vec<f64>,
}

impl LatentTriple {
    pub fn new(s_alpha: Vec<f64>, s_sigma: Vec<f64>, s_mu: Vec<f64>) -> Result<Self, MixtureError> {
        if s_alpha.is_empty() || s_alpha.len() != s_sigma.len() || s_alpha.len() != s_mu.len() {
            return Err(MixtureError::LatentLengths {
                alpha: s_alpha.len(),
                sigma: s_sigma.len(),
                mu: s_mu.len(),
            });
        }
        if [&s_alpha, &s_sigma, &s_mu]
            .iter()
            .any(|v| v.iter().any(|x| !x.is_finite()))
        {
            return Err(MixtureError::NonFiniteLatent);
        }
        Ok(Self { s_alpha, s_sigma, s_mu })
    }

    /// Splits a flat latent row of width 3m laid out as
    /// [s_alpha | s_sigma | s_mu].
    pub fn from_flat(row: &[f64]) -> Result<Self, MixtureError> {
        if row.is_empty() || row.len() % 3 != 0 {
            return Err(MixtureError::LatentLengths {
                alpha: row.len(),
                sigma: 0,
                mu: 0,
            });
        }
        let m = row.len() / 3;
        Self::new(row[..m].to_vec(), row[m..2 * m].to_vec(), row[2 * m..].to_vec())
    }

    pub fn component_count(&self) -> usize {
        self.s_alpha.len()
    }
}

/// Parameters of a univariate Gaussian mixture: weights sum to one,
/// standard deviations are strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmParams {
    pub alpha: Vec<f64>,
    pub sigma: Vec<f64>,
    pub mu: Vec<f64>,
}

impl GmmParams {
    pub fn new(alpha: Vec<f64>, sigma: Vec<f64>, mu: Vec<f64>) -> Result<Self, MixtureError> {
        let p = Self { alpha, sigma, mu };
        p.validate()?;
        Ok(p)
    }

    pub fn component_count(&self) -> usize {
        self.alpha.len()
    }

    pub fn validate(&self) -> Result<(), MixtureError> {
        if self.alpha.is_empty()
            || self.alpha.len() != self.sigma.len()
            || self.alpha.len() != self.mu.len()
        {
            return Err(MixtureError::InvalidParams(format!(
                "component lengths differ: ({}, {}, {})",
                self.alpha.len(),
                self.sigma.len(),
                self.mu.len()
            )));
        }
        let sum: f64 = self.alpha.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(MixtureError::InvalidParams(format!(
                "mixing coefficients sum to {sum}, not 1"
            )));
        }
        if self.alpha.iter().any(|a| !(*a > 0.0 && *a <= 1.0)) {
            return Err(MixtureError::InvalidParams(
                "mixing coefficients must lie in (0, 1]".into(),
            ));
        }
        if self.sigma.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(MixtureError::InvalidParams(
                "standard deviations must be positive and finite".into(),
            ));
        }
        if self.mu.iter().any(|m| !m.is_finite()) {
            return Err(MixtureError::InvalidParams("non-finite mean".into()));
        }
        Ok(())
    }
}

/// α via max-subtracted softmax, σ via exp floored at `SIGMA_FLOOR`,
/// μ taken directly.
pub fn map_latents(s: &LatentTriple) -> Result<GmmParams, MixtureError> {
    let max = s.s_alpha.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = s.s_alpha.iter().map(|v| (v - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    let alpha: Vec<f64> = exps.iter().map(|e| e / total).collect();
    let sigma: Vec<f64> = s.s_sigma.iter().map(|v| v.exp().max(SIGMA_FLOOR)).collect();
    GmmParams::new(alpha, sigma, s.s_mu.clone())
}

/// Per-component log densities ln(α_i) + ln N(y | μ_i, σ_i).
fn component_log_terms(p: &GmmParams, y: f64) -> Vec<f64> {
    p.alpha
        .iter()
        .zip(&p.sigma)
        .zip(&p.mu)
        .map(|((&a, &s), &m)| {
            let z = (y - m) / s;
            a.ln() - s.ln() - 0.5 * LN_2PI - 0.5 * z * z
        })
        .collect()
}

/// Mixture density Σ α_i N(y | μ_i, σ_i), evaluated as exp(log_likelihood).
pub fn likelihood(p: &GmmParams, y: f64) -> f64 {
    log_likelihood(p, y).exp()
}

/// log Σ α_i N(y | μ_i, σ_i) via log-sum-exp; finite for any y when the
/// σ floor holds.
pub fn log_likelihood(p: &GmmParams, y: f64) -> f64 {
    let terms = component_log_terms(p, y);
    // Non-empty by the GmmParams invariant.
    log_sum_exp(&terms).expect("non-empty mixture")
}

/// Most-likely value of the mixture density. Exact for m = 1; otherwise
/// the best component mean seeds a golden-section ascent over ±3σ of the
/// seed component, refined to 1e-8.
pub fn gmm_mode(p: &GmmParams) -> f64 {
    if p.mu.len() == 1 {
        return p.mu[0];
    }
    let mut best_idx = 0;
    let mut best_density = f64::NEG_INFINITY;
    for (i, &m) in p.mu.iter().enumerate() {
        let d = log_likelihood(p, m);
        if d > best_density {
            best_density = d;
            best_idx = i;
        }
    }
    let center = p.mu[best_idx];
    let radius = 3.0 * p.sigma[best_idx];
    golden_section_max(|y| log_likelihood(p, y), center - radius, center + radius, 1e-8)
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = 0.618_033_988_749_894_9;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Ancestral sample: component index by the mixing weights, then a normal
/// draw from that component.
pub fn gmm_sample(p: &GmmParams, rng: &mut Rng) -> f64 {
    let u = rng.next_uniform();
    let mut acc = 0.0;
    let mut idx = p.alpha.len() - 1;
    for (i, &a) in p.alpha.iter().enumerate() {
        acc += a;
        if u < acc {
            idx = i;
            break;
        }
    }
    rng.normal(p.mu[idx], p.sigma[idx])
}

/// Convex combination of posteriors: components are concatenated with
/// their weights multiplied in, then renormalized against floating-point
/// drift. The result's density is the weighted average of the members'.
pub fn pool(posteriors: &[GmmParams], weights: &[f64]) -> Result<GmmParams, MixtureError> {
    if posteriors.is_empty() {
        return Err(MixtureError::EmptyPool);
    }
    if posteriors.len() != weights.len() {
        return Err(MixtureError::InvalidParams(format!(
            "{} posteriors but {} weights",
            posteriors.len(),
            weights.len()
        )));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(MixtureError::BadPoolWeights { sum });
    }
    let mut alpha = Vec::new();
    let mut sigma = Vec::new();
    let mut mu = Vec::new();
    for (p, &w) in posteriors.iter().zip(weights) {
        p.validate()?;
        if !(w > 0.0) {
            return Err(MixtureError::InvalidParams(format!(
                "pool weights must be positive, got {w}"
            )));
        }
        for i in 0..p.alpha.len() {
            alpha.push(w * p.alpha[i]);
            sigma.push(p.sigma[i]);
            mu.push(p.mu[i]);
        }
    }
    let total: f64 = alpha.iter().sum();
    for a in &mut alpha {
        *a /= total;
    }
    GmmParams::new(alpha, sigma, mu)
}

/// Uniform pooling over a set of posteriors.
pub fn pool_uniform(posteriors: &[GmmParams]) -> Result<GmmParams, MixtureError> {
    let w = vec![1.0 / posteriors.len() as f64; posteriors.len()];
    pool(posteriors, &w)
}

/// A posterior together with the point forecast read off it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictivePosterior {
    pub params: GmmParams,
    pub point: f64,
    pub origin: String,
}

impl PredictivePosterior {
    pub fn new(params: GmmParams, origin: impl Into<String>) -> Self {
        let point = gmm_mode(&params);
        Self {
            params,
            point,
            origin: origin.into(),
        }
    }
}
