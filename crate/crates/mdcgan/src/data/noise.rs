//! Additive Gaussian test-set perturbations.

use super::{DataError, TimeSeries};
use crate::numeric::Rng;

/// Adds i.i.d. N(0, (pct·A)²) noise to every point, where A is the range
/// (max − min) of the clean series passed in — so on data normalized to
/// [0,1], 30% noise means σ = 0.3.
pub fn add_noise(series: &TimeSeries, pct: f64, rng: &mut Rng) -> Result<TimeSeries, DataError> {
    if pct < 0.0 {
        return Err(DataError::InvalidParam(format!("noise pct must be >= 0, got {pct}")));
    }
    if pct == 0.0 {
        return Ok(series.clone());
    }
    let sigma = pct * series.range();
    let values = series
        .values
        .iter()
        .map(|v| v + rng.normal(0.0, sigma))
        .collect();
    Ok(TimeSeries {
        name: series.name.clone(),
        values,
        scaler: series.scaler,
    })
}

/// Noise applied to the test region only: indices at or beyond
/// `first_noisy` are perturbed, earlier (training) values stay clean.
/// The amplitude base A is the range of the full clean series.
pub fn with_noisy_tail(
    series: &TimeSeries,
    first_noisy: usize,
    pct: f64,
    rng: &mut Rng,
) -> Result<TimeSeries, DataError> {
    if pct < 0.0 {
        return Err(DataError::InvalidParam(format!("noise pct must be >= 0, got {pct}")));
    }
    let mut out = series.clone();
    if pct == 0.0 {
        return Ok(out);
    }
    let sigma = pct * series.range();
    for v in out.values.iter_mut().skip(first_noisy) {
        *v += rng.normal(0.0, sigma);
    }
    Ok(out)
}
