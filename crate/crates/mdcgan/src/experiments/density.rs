//! Posterior density surfaces over the test region.

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::data::WindowedDataset;
use crate::mixture::likelihood;
use crate::models::Forecaster;
use crate::numeric::Rng;

/// Density values on a fixed y-grid, one row per test step, with the
/// true test values alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub y_grid: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub truths: Vec<f64>,
}

impl DensityGrid {
    /// Trapezoid integral of one time slice.
    pub fn slice_integral(&self, row: usize) -> f64 {
        let h = self.y_grid[1] - self.y_grid[0];
        let r = &self.rows[row];
        let mut total = 0.5 * (r[0] + r[r.len() - 1]);
        total += r[1..r.len() - 1].iter().sum::<f64>();
        total * h
    }

    /// CSV with the y-grid as header and one row per time step.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("step");
        for y in &self.y_grid {
            out.push(',');
            out.push_str(&y.to_string());
        }
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(&i.to_string());
            for v in row {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Companion CSV of the true test values.
    pub fn truths_csv(&self) -> String {
        let mut out = String::from("step,truth\n");
        for (i, t) in self.truths.iter().enumerate() {
            out.push_str(&format!("{i},{t}\n"));
        }
        out
    }
}

/// Evaluates the model's pooled posterior density on a shared uniform
/// y-grid per test step. The grid spans every posterior's mass (±8σ
/// around all component means, widened to include the truths), so each
/// slice integrates to ≈ 1 at adequate resolution.
pub fn density_grid(
    model: &Forecaster,
    test: &WindowedDataset,
    resolution: usize,
    samples: usize,
    rng: &mut Rng,
) -> Result<DensityGrid, ExperimentError> {
    if resolution < 2 {
        return Err(ExperimentError::InvalidSpec(
            "density grid resolution must be >= 2".into(),
        ));
    }
    if test.is_empty() {
        return Err(ExperimentError::EmptyInput("density_grid"));
    }
    let mut posteriors = Vec::with_capacity(test.len());
    for input in &test.inputs {
        let pred = model.predict(input, samples, rng)?;
        let posterior = pred.posterior.ok_or_else(|| ExperimentError::NoPosterior {
            model: model.kind.to_string(),
        })?;
        posteriors.push(posterior);
    }

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in &posteriors {
        for (mu, sigma) in p.mu.iter().zip(&p.sigma) {
            lo = lo.min(mu - 8.0 * sigma);
            hi = hi.max(mu + 8.0 * sigma);
        }
    }
    for &t in &test.targets {
        lo = lo.min(t);
        hi = hi.max(t);
    }

    let y_grid: Vec<f64> = (0..resolution)
        .map(|i| lo + (hi - lo) * i as f64 / (resolution - 1) as f64)
        .collect();
    let rows: Vec<Vec<f64>> = posteriors
        .iter()
        .map(|p| y_grid.iter().map(|&y| likelihood(p, y)).collect())
        .collect();

    Ok(DensityGrid {
        y_grid,
        rows,
        truths: test.targets.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{window_pairs, TimeSeries};
    use crate::models::{train_mdn, GenLoss, TrainConfig};

    fn trained_mdn() -> (Forecaster, WindowedDataset) {
        let values: Vec<f64> = (0..260)
            .map(|i| 0.5 + 0.3 * (i as f64 * 0.25).sin())
            .collect();
        let series = TimeSeries::new("wave", values).unwrap();
        let data = window_pairs(&series, 5).unwrap();
        let cfg = TrainConfig {
            iterations: 600,
            batch: 16,
            n: 8,
            seed: 5,
            gen_loss: GenLoss::LogLikelihood,
            ..Default::default()
        };
        let (model, _) = train_mdn(&data, &cfg).unwrap();
        let test = WindowedDataset {
            inputs: data.inputs[200..240].to_vec(),
            targets: data.targets[200..240].to_vec(),
            k: 5,
            horizon: 1,
        };
        (model, test)
    }

    #[test]
    fn slices_integrate_to_one() {
        let (model, test) = trained_mdn();
        let mut rng = Rng::from_seed(1);
        let grid = density_grid(&model, &test, 2000, 4, &mut rng).unwrap();
        for row in 0..grid.rows.len() {
            let integral = grid.slice_integral(row);
            assert!((integral - 1.0).abs() < 1e-3, "row {row}: {integral}");
        }
    }

    #[test]
    fn unimodal_peak_sits_at_the_posterior_mean() {
        let (model, test) = trained_mdn();
        let mut rng = Rng::from_seed(1);
        let grid = density_grid(&model, &test, 800, 4, &mut rng).unwrap();
        let cell = grid.y_grid[1] - grid.y_grid[0];
        for (i, input) in test.inputs.iter().enumerate() {
            let posterior = model
                .predict(input, 4, &mut Rng::from_seed(1))
                .unwrap()
                .posterior
                .unwrap();
            let argmax = grid.rows[i]
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(j, _)| grid.y_grid[j])
                .unwrap();
            assert!(
                (argmax - posterior.mu[0]).abs() <= cell,
                "slice {i}: argmax {argmax} vs mu {}",
                posterior.mu[0]
            );
        }
    }

    #[test]
    fn refining_the_grid_barely_moves_slice_integrals() {
        let (model, test) = trained_mdn();
        let coarse = density_grid(&model, &test, 2000, 4, &mut Rng::from_seed(1)).unwrap();
        let fine = density_grid(&model, &test, 4000, 4, &mut Rng::from_seed(1)).unwrap();
        for row in 0..coarse.rows.len() {
            let delta = (coarse.slice_integral(row) - fine.slice_integral(row)).abs();
            assert!(delta < 1e-4, "row {row}: delta {delta}");
        }
    }

    #[test]
    fn point_models_are_rejected() {
        let values: Vec<f64> = (0..120).map(|i| 0.4 + 0.01 * i as f64).collect();
        let series = TimeSeries::new("t", values).unwrap();
        let model = crate::models::train_ar(&series, 0, &TrainConfig::default()).unwrap();
        let data = window_pairs(&series, 5).unwrap();
        let mut rng = Rng::from_seed(1);
        assert!(matches!(
            density_grid(&model, &data, 100, 1, &mut rng),
            Err(ExperimentError::NoPosterior { .. })
        ));
    }
}
