//! Experiment execution. Each (model, seed) cell owns its models, rngs
//! and data copies; the grid is embarrassingly parallel and every rng is
//! derived from named substreams so results are independent of
//! scheduling and worker count.

use rayon::prelude::*;

use super::metrics::{mse, nll_stats, recursive_forecast};
use super::results::{Cell, NamedGrid, ResultsTable, SeedValue, TableMetadata};
use super::spec::{ExperimentKind, ExperimentSpec};
use super::{density_grid, ExperimentError};
use crate::data::{window_pairs, Split, TimeSeries, WindowedDataset};
use crate::models::{
    train_ar, train_cgan, train_mdcgan, train_mdn, train_snn, Forecaster, ModelKind, TrainConfig,
};
use crate::numeric::{stream_id, Rng};

/// Trains one model for an experiment cell. Networks train on the
/// windowed training pairs; AR models fit on the training-region values.
pub fn train_model(
    kind: ModelKind,
    series: &TimeSeries,
    split: &Split,
    cfg: &TrainConfig,
) -> Result<Forecaster, ExperimentError> {
    let model = match kind {
        ModelKind::Ar(order) => {
            let region = TimeSeries::new(
                format!("{}[train]", series.name),
                series.values[..split.first_test_target].to_vec(),
            )?;
            train_ar(&region, order, cfg)?
        }
        ModelKind::Snn => train_snn(&split.train, cfg)?.0,
        ModelKind::Mdn => train_mdn(&split.train, cfg)?.0,
        ModelKind::Cgan => train_cgan(&split.train, cfg)?.0,
        ModelKind::MdCgan => train_mdcgan(&split.train, cfg)?.0,
    };
    Ok(model)
}

fn cell_error(model: &str, condition: &str, source: ExperimentError) -> ExperimentError {
    ExperimentError::Cell {
        model: model.to_string(),
        condition: condition.to_string(),
        source: Box::new(source),
    }
}

/// Test input windows rebuilt from the series with noise on the test
/// region only (training values stay clean even where they fall inside
/// the first test windows). Returns the noisy windows; scoring uses the
/// clean targets, mirroring the adversarial-perturbation protocol.
fn noisy_test_inputs(
    series: &TimeSeries,
    split: &Split,
    pct: f64,
    rng: &mut Rng,
) -> Result<Vec<Vec<f64>>, ExperimentError> {
    let noisy = crate::data::with_noisy_tail(series, split.first_test_target, pct, rng)?;
    let all = window_pairs(&noisy, split.k)?;
    let n_train = split.train.len();
    let n_test = split.test.len();
    Ok(all.inputs[n_train..n_train + n_test].to_vec())
}

fn predictions_over(
    model: &Forecaster,
    inputs: &[Vec<f64>],
    samples: usize,
    rng: &mut Rng,
) -> Result<Vec<f64>, ExperimentError> {
    inputs
        .iter()
        .map(|x| Ok(model.predict(x, samples, rng)?.point))
        .collect()
}

/// Trains every model once per seed on the clean training split, then
/// scores one-step MSE against the clean test targets with the test
/// inputs perturbed at each noise level. The noise realization is drawn
/// once per (noise level, seed) and shared by all models.
pub fn noise_sweep(spec: &ExperimentSpec) -> Result<ResultsTable, ExperimentError> {
    spec.validate()?;
    let (series, split, recorded_manifest) = spec.dataset.realize()?;
    let mut resolved = spec.clone();
    resolved.dataset = recorded_manifest;

    let grid: Vec<(ModelKind, u64)> = resolved
        .models
        .iter()
        .flat_map(|&m| resolved.seeds.iter().map(move |&s| (m, s)))
        .collect();

    // cell results: per (model, seed) a vector over noise levels
    let results: Result<Vec<Vec<f64>>, ExperimentError> = grid
        .par_iter()
        .map(|&(kind, seed)| {
            let model_name = kind.to_string();
            let cfg = TrainConfig {
                seed,
                ..resolved.train.clone()
            };
            let model = train_model(kind, &series, &split, &cfg)
                .map_err(|e| cell_error(&model_name, "train", e))?;
            let mut row = Vec::with_capacity(resolved.noise_levels.len());
            for (li, &pct) in resolved.noise_levels.iter().enumerate() {
                let condition = format!("noise {:.0}%", pct * 100.0);
                // One realization per (level, seed), shared across models.
                let mut noise_rng =
                    Rng::with_stream(seed, stream_id(&["noise", &li.to_string()]));
                let inputs = noisy_test_inputs(&series, &split, pct, &mut noise_rng)
                    .map_err(|e| cell_error(&model_name, &condition, e))?;
                let mut pred_rng = Rng::with_stream(
                    seed,
                    stream_id(&["predict", &model_name, &li.to_string()]),
                );
                let preds = predictions_over(&model, &inputs, resolved.samples, &mut pred_rng)
                    .map_err(|e| cell_error(&model_name, &condition, e))?;
                let value = mse(&preds, &split.test.targets)
                    .map_err(|e| cell_error(&model_name, &condition, e))?;
                row.push(value);
            }
            Ok(row)
        })
        .collect();
    let results = results?;

    let mut cells = Vec::with_capacity(resolved.models.len());
    for (mi, _) in resolved.models.iter().enumerate() {
        let mut row = Vec::with_capacity(resolved.noise_levels.len());
        for li in 0..resolved.noise_levels.len() {
            let per_seed: Vec<SeedValue> = resolved
                .seeds
                .iter()
                .enumerate()
                .map(|(si, &seed)| SeedValue {
                    seed,
                    value: results[mi * resolved.seeds.len() + si][li],
                    dispersion: None,
                })
                .collect();
            row.push(Cell::from_seeds(per_seed));
        }
        cells.push(row);
    }

    let title = format!("{}: MSE by test noise level", series.name);
    let row_labels = resolved.models.iter().map(|m| m.to_string()).collect();
    let col_labels = resolved
        .noise_levels
        .iter()
        .map(|p| format!("{:.0}% noise", p * 100.0))
        .collect();
    Ok(ResultsTable {
        title,
        row_labels,
        col_labels,
        cells,
        metadata: TableMetadata::new(resolved)?,
        density_grids: Vec::new(),
    })
}

/// Recursive-forecast MSE over the test region as a ratio to the
/// martingale baseline on identical windows. Forecast origins step
/// through the test region `horizon` apart; errors average over the
/// whole path unless `endpoint_only` is set.
pub fn horizon_eval(spec: &ExperimentSpec) -> Result<ResultsTable, ExperimentError> {
    spec.validate()?;
    let (series, split, recorded_manifest) = spec.dataset.realize()?;
    let mut resolved = spec.clone();
    resolved.dataset = recorded_manifest;
    let horizon = resolved.horizon;

    // Forecast origins: the start of each non-overlapping horizon block.
    let mut origins = Vec::new();
    let mut t0 = split.first_test_target;
    while t0 + horizon <= series.len() {
        origins.push(t0);
        t0 += horizon;
    }
    if origins.is_empty() {
        return Err(ExperimentError::InvalidSpec(format!(
            "horizon {horizon} does not fit in the test region"
        )));
    }

    let score = |model: &Forecaster, seed: u64, name: &str| -> Result<f64, ExperimentError> {
        let mut rng = Rng::with_stream(seed, stream_id(&["horizon", name]));
        let mut preds = Vec::new();
        let mut truths = Vec::new();
        for &origin in &origins {
            let window = &series.values[origin - split.k..origin];
            let path = recursive_forecast(model, window, horizon, resolved.samples, &mut rng)?;
            if resolved.endpoint_only {
                preds.push(path[horizon - 1]);
                truths.push(series.values[origin + horizon - 1]);
            } else {
                preds.extend_from_slice(&path);
                truths.extend_from_slice(&series.values[origin..origin + horizon]);
            }
        }
        mse(&preds, &truths)
    };

    let grid: Vec<(ModelKind, u64)> = resolved
        .models
        .iter()
        .flat_map(|&m| resolved.seeds.iter().map(move |&s| (m, s)))
        .collect();

    let results: Result<Vec<f64>, ExperimentError> = grid
        .par_iter()
        .map(|&(kind, seed)| {
            let model_name = kind.to_string();
            let cfg = TrainConfig {
                seed,
                ..resolved.train.clone()
            };
            let model = train_model(kind, &series, &split, &cfg)
                .map_err(|e| cell_error(&model_name, "train", e))?;
            // The baseline is evaluated inside each cell so the ratio is
            // self-contained (AR(0) is deterministic, so this is cheap
            // and bit-stable across cells).
            let baseline = train_model(ModelKind::Ar(0), &series, &split, &cfg)
                .map_err(|e| cell_error("ar0", "train", e))?;
            let model_mse = score(&model, seed, &model_name)
                .map_err(|e| cell_error(&model_name, "horizon", e))?;
            let baseline_mse = score(&baseline, seed, "ar0")
                .map_err(|e| cell_error("ar0", "horizon", e))?;
            if baseline_mse == 0.0 {
                return Err(ExperimentError::ZeroBaseline);
            }
            Ok(model_mse / baseline_mse)
        })
        .collect();
    let results = results?;

    let cells: Vec<Vec<Cell>> = resolved
        .models
        .iter()
        .enumerate()
        .map(|(mi, _)| {
            let per_seed: Vec<SeedValue> = resolved
                .seeds
                .iter()
                .enumerate()
                .map(|(si, &seed)| SeedValue {
                    seed,
                    value: results[mi * resolved.seeds.len() + si],
                    dispersion: None,
                })
                .collect();
            vec![Cell::from_seeds(per_seed)]
        })
        .collect();

    let title = format!(
        "{}: {horizon}-step recursive MSE ratio to the martingale baseline",
        series.name
    );
    let row_labels = resolved.models.iter().map(|m| m.to_string()).collect();
    let col_labels = vec![format!("mse ratio (h={horizon})")];
    Ok(ResultsTable {
        title,
        row_labels,
        col_labels,
        cells,
        metadata: TableMetadata::new(resolved)?,
        density_grids: Vec::new(),
    })
}

/// Trains the mixture GAN at each mixture order and reports the mean and
/// per-test-point standard deviation of the one-step negative log
/// likelihood.
pub fn mixture_order_study(spec: &ExperimentSpec) -> Result<ResultsTable, ExperimentError> {
    spec.validate()?;
    let (series, split, recorded_manifest) = spec.dataset.realize()?;
    let mut resolved = spec.clone();
    resolved.dataset = recorded_manifest;

    let grid: Vec<(usize, u64)> = resolved
        .m_values
        .iter()
        .flat_map(|&m| resolved.seeds.iter().map(move |&s| (m, s)))
        .collect();

    type MCell = ((f64, f64), Option<NamedGrid>);
    let results: Result<Vec<MCell>, ExperimentError> = grid
        .par_iter()
        .map(|&(m, seed)| {
            let row_name = format!("m={m}");
            let cfg = TrainConfig {
                seed,
                m,
                ..resolved.train.clone()
            };
            let model = train_model(ModelKind::MdCgan, &series, &split, &cfg)
                .map_err(|e| cell_error(&row_name, "train", e))?;
            let mut rng = Rng::with_stream(seed, stream_id(&["mstudy", &row_name]));
            let mut posteriors = Vec::with_capacity(split.test.len());
            for input in &split.test.inputs {
                let pred = model
                    .predict(input, resolved.samples, &mut rng)
                    .map_err(|e| cell_error(&row_name, "predict", e.into()))?;
                posteriors.push(pred.posterior.ok_or_else(|| ExperimentError::NoPosterior {
                    model: row_name.clone(),
                })?);
            }
            let stats = nll_stats(&posteriors, &split.test.targets)
                .map_err(|e| cell_error(&row_name, "nll", e))?;
            // Density surface for the first seed when requested.
            let named_grid = match (resolved.density_resolution, seed == resolved.seeds[0]) {
                (Some(resolution), true) => {
                    let mut grid_rng = Rng::with_stream(seed, stream_id(&["grid", &row_name]));
                    let grid = density_grid(
                        &model,
                        &split.test,
                        resolution,
                        resolved.samples,
                        &mut grid_rng,
                    )
                    .map_err(|e| cell_error(&row_name, "grid", e))?;
                    Some(NamedGrid {
                        name: row_name.clone(),
                        grid,
                    })
                }
                _ => None,
            };
            Ok((stats, named_grid))
        })
        .collect();
    let results = results?;

    let mut cells = Vec::new();
    let mut grids = Vec::new();
    for (mi, _) in resolved.m_values.iter().enumerate() {
        let per_seed: Vec<SeedValue> = resolved
            .seeds
            .iter()
            .enumerate()
            .map(|(si, &seed)| {
                let ((mean, std), _) = &results[mi * resolved.seeds.len() + si];
                SeedValue {
                    seed,
                    value: *mean,
                    dispersion: Some(*std),
                }
            })
            .collect();
        cells.push(vec![Cell::from_seeds(per_seed)]);
        for (_, g) in &results[mi * resolved.seeds.len()..(mi + 1) * resolved.seeds.len()] {
            if let Some(g) = g {
                grids.push(g.clone());
            }
        }
    }

    let title = format!("{}: negative log-likelihood by mixture order", series.name);
    let row_labels = resolved.m_values.iter().map(|m| format!("m={m}")).collect();
    let col_labels = vec!["nll (per-point std)".to_string()];
    Ok(ResultsTable {
        title,
        row_labels,
        col_labels,
        cells,
        metadata: TableMetadata::new(resolved)?,
        density_grids: grids,
    })
}

/// Re-runs the experiment recorded in a table's metadata; the result
/// must reproduce every cell bit for bit.
pub fn rerun(metadata: &TableMetadata) -> Result<ResultsTable, ExperimentError> {
    match metadata.spec.kind {
        ExperimentKind::NoiseSweep => noise_sweep(&metadata.spec),
        ExperimentKind::Horizon => horizon_eval(&metadata.spec),
        ExperimentKind::MixtureOrder => mixture_order_study(&metadata.spec),
    }
}

#[cfg(test)]
#[path = "runner_tests.rs"]
mod tests;
