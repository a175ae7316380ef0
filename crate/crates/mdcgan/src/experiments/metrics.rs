//! Point and likelihood metrics, and recursive multi-step forecasting.

use super::ExperimentError;
use crate::mixture::{log_likelihood, GmmParams};
use crate::models::{Forecaster, ModelError};
use crate::numeric::Rng;

/// Mean squared error.
pub fn mse(predictions: &[f64], truths: &[f64]) -> Result<f64, ExperimentError> {
    if predictions.is_empty() || predictions.len() != truths.len() {
        return Err(ExperimentError::EmptyInput("mse"));
    }
    let total: f64 = predictions
        .iter()
        .zip(truths)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok(total / predictions.len() as f64)
}

/// Mean and population standard deviation of the per-point negative log
/// likelihoods −ln p(y_t | posterior_t).
pub fn nll_stats(
    posteriors: &[GmmParams],
    truths: &[f64],
) -> Result<(f64, f64), ExperimentError> {
    if posteriors.is_empty() || posteriors.len() != truths.len() {
        return Err(ExperimentError::EmptyInput("nll_stats"));
    }
    let nlls: Vec<f64> = posteriors
        .iter()
        .zip(truths)
        .map(|(p, &y)| -log_likelihood(p, y))
        .collect();
    let n = nlls.len() as f64;
    let mean = nlls.iter().sum::<f64>() / n;
    let var = nlls.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}

/// Iterated one-step forecasting: each point forecast is appended to the
/// window (dropping its oldest element) and fed back. Probabilistic
/// models feed their posterior mode forward.
pub fn recursive_forecast(
    model: &Forecaster,
    window: &[f64],
    horizon: usize,
    samples: usize,
    rng: &mut Rng,
) -> Result<Vec<f64>, ModelError> {
    let mut window = window.to_vec();
    let mut out = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let point = model.predict(&window, samples, rng)?.point;
        out.push(point);
        window.rotate_left(1);
        let last = window.len() - 1;
        window[last] = point;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::TimeSeries;
    use crate::models::{train_ar, ArModel, TrainConfig};

    #[test]
    fn mse_examples() {
        assert_eq!(mse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mse(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        let v = mse(&[1.0, 2.0, 3.0], &[2.0, 2.0, 2.0]).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
        assert!(mse(&[], &[]).is_err());
        assert!(mse(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn nll_constant_contribution() {
        // μ = y, σ = 1 everywhere: each NLL is ½ln(2π) and the spread 0.
        let posteriors: Vec<GmmParams> = (0..5)
            .map(|i| GmmParams::new(vec![1.0], vec![1.0], vec![i as f64]).unwrap())
            .collect();
        let truths: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let (mean, std) = nll_stats(&posteriors, &truths).unwrap();
        assert!((mean - 0.9189385332046727).abs() < 1e-12);
        assert!(std.abs() < 1e-12);
    }

    #[test]
    fn nll_two_point_stats() {
        // NLLs {1, 3} → mean 2, population std 1. Choose σ = 1 and solve
        // the exponent for the distance that gives each NLL.
        let delta_for = |nll: f64| {
            let c = 0.5 * (2.0 * std::f64::consts::PI).ln();
            (2.0 * (nll - c)).sqrt()
        };
        let posteriors = vec![
            GmmParams::new(vec![1.0], vec![1.0], vec![delta_for(1.0)]).unwrap(),
            GmmParams::new(vec![1.0], vec![1.0], vec![delta_for(3.0)]).unwrap(),
        ];
        let (mean, std) = nll_stats(&posteriors, &[0.0, 0.0]).unwrap();
        assert!((mean - 2.0).abs() < 1e-12, "mean {mean}");
        assert!((std - 1.0).abs() < 1e-12, "std {std}");
    }

    #[test]
    fn nll_matches_naive_loop_and_ignores_order() {
        let mut rng = Rng::from_seed(3);
        let posteriors: Vec<GmmParams> = (0..20)
            .map(|_| {
                GmmParams::new(
                    vec![0.4, 0.6],
                    vec![rng.uniform_in(0.1, 1.0), rng.uniform_in(0.1, 1.0)],
                    vec![rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0)],
                )
                .unwrap()
            })
            .collect();
        let truths: Vec<f64> = (0..20).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
        let (mean, _) = nll_stats(&posteriors, &truths).unwrap();
        let naive: f64 = posteriors
            .iter()
            .zip(&truths)
            .map(|(p, &y)| -log_likelihood(p, y))
            .sum::<f64>()
            / 20.0;
        assert!((mean - naive).abs() < 1e-12);

        let mut rev_p = posteriors.clone();
        rev_p.reverse();
        let mut rev_t = truths.clone();
        rev_t.reverse();
        let (mean_rev, _) = nll_stats(&rev_p, &rev_t).unwrap();
        assert!((mean - mean_rev).abs() < 1e-12);
    }

    #[test]
    fn recursive_geometric_decay_for_handcrafted_ar1() {
        // AR(1) with coefficient 0.5 and no intercept: feeding forecasts
        // back halves the value every step.
        let model = Forecaster::from_ar_model(
            ArModel {
                order: 1,
                coefficients: vec![0.0, 0.5],
            },
            TrainConfig::default(),
        );
        let mut rng = Rng::from_seed(1);
        let path = recursive_forecast(&model, &[0.3, 1.0], 4, 1, &mut rng).unwrap();
        let expected = [0.5, 0.25, 0.125, 0.0625];
        for (got, want) in path.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{path:?}");
        }
    }

    #[test]
    fn recursive_martingale_repeats_last_value() {
        let series = TimeSeries::new("t", vec![0.1, 0.2, 0.7, 0.42]).unwrap();
        let model = train_ar(&series, 0, &TrainConfig::default()).unwrap();
        let mut rng = Rng::from_seed(1);
        let path = recursive_forecast(&model, &[0.7, 0.42], 5, 1, &mut rng).unwrap();
        assert_eq!(path, vec![0.42; 5]);
    }

    #[test]
    fn recursive_horizon_one_equals_predict() {
        let series = TimeSeries::new(
            "t",
            (0..100).map(|i| (i as f64 * 0.1).sin() * 0.4 + 0.5).collect(),
        )
        .unwrap();
        let model = train_ar(&series, 3, &TrainConfig::default()).unwrap();
        let window = [0.5, 0.6, 0.55];
        let mut rng = Rng::from_seed(1);
        let path = recursive_forecast(&model, &window, 1, 1, &mut rng).unwrap();
        let direct = model.predict(&window, 1, &mut Rng::from_seed(1)).unwrap();
        assert_eq!(path[0], direct.point);
    }
}
