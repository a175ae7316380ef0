use super::*;
use crate::data::{DataSource, DatasetManifest, SplitSpec};
use crate::models::GenLoss;

/// A small, fast spec: GBM surrogate, cheap models, tiny nets.
fn small_spec(kind: ExperimentKind, models: Vec<ModelKind>) -> ExperimentSpec {
    let mut spec = ExperimentSpec::new(
        kind,
        DatasetManifest::new(
            DataSource::Gbm {
                length: 360,
                drift: 0.0,
                vol: 0.03,
                seed: 9,
            },
            SplitSpec {
                k: 5,
                n_train: 250,
                n_test: 100,
            },
        ),
        models,
    );
    spec.seeds = vec![1, 2];
    spec.noise_levels = vec![0.0, 0.1];
    spec.samples = 8;
    spec.train = TrainConfig {
        iterations: 60,
        n: 8,
        batch: 16,
        gen_loss: GenLoss::LogLikelihood,
        ..Default::default()
    };
    spec
}

#[test]
fn sweep_zero_level_equals_direct_evaluation() {
    // The sweep's 0% column must equal a plain one-step evaluation: the
    // plumbing adds nothing.
    let spec = small_spec(
        ExperimentKind::NoiseSweep,
        vec![ModelKind::Ar(0), ModelKind::Ar(3)],
    );
    let table = noise_sweep(&spec).unwrap();
    assert_eq!(table.row_labels, vec!["ar0", "ar3"]);
    assert_eq!(table.col_labels.len(), 2);

    let (series, split, _) = spec.dataset.realize().unwrap();
    let model = train_model(ModelKind::Ar(0), &series, &split, &spec.train).unwrap();
    let mut rng = Rng::from_seed(0);
    let preds: Vec<f64> = split
        .test
        .inputs
        .iter()
        .map(|x| model.predict(x, 1, &mut rng).unwrap().point)
        .collect();
    let direct = mse(&preds, &split.test.targets).unwrap();
    assert_eq!(table.cells[0][0].value.to_bits(), direct.to_bits());
}

#[test]
fn sweep_noise_hurts_the_martingale() {
    let mut spec = small_spec(ExperimentKind::NoiseSweep, vec![ModelKind::Ar(0)]);
    spec.noise_levels = vec![0.0, 0.05, 0.15, 0.3];
    let table = noise_sweep(&spec).unwrap();
    let row = &table.cells[0];
    for pair in row.windows(2) {
        assert!(
            pair[0].value < pair[1].value,
            "noise ladder not increasing: {:?}",
            row.iter().map(|c| c.value).collect::<Vec<_>>()
        );
    }
}

#[test]
fn sweep_is_bit_reproducible_from_metadata() {
    let spec = small_spec(
        ExperimentKind::NoiseSweep,
        vec![ModelKind::Ar(0), ModelKind::Snn],
    );
    let table = noise_sweep(&spec).unwrap();
    let again = rerun(&table.metadata).unwrap();
    assert!(table.cells_bit_identical(&again));
    assert_eq!(table.metadata.content_hash, again.metadata.content_hash);
}

#[test]
fn sweep_survives_json_round_trip() {
    let spec = small_spec(ExperimentKind::NoiseSweep, vec![ModelKind::Ar(0)]);
    let table = noise_sweep(&spec).unwrap();
    let json = table.to_json().unwrap();
    let back = ResultsTable::from_json(&json).unwrap();
    assert!(table.cells_bit_identical(&back));
    let again = rerun(&back.metadata).unwrap();
    assert!(table.cells_bit_identical(&again));
}

#[test]
fn horizon_martingale_ratio_is_exactly_one() {
    let mut spec = small_spec(
        ExperimentKind::Horizon,
        vec![ModelKind::Ar(0), ModelKind::Ar(2)],
    );
    spec.horizon = 10;
    let table = horizon_eval(&spec).unwrap();
    assert_eq!(table.cells[0][0].value, 1.0);
    for sv in &table.cells[0][0].per_seed {
        assert_eq!(sv.value, 1.0);
    }
    // Ratios are nonnegative.
    assert!(table.cells.iter().flatten().all(|c| c.value >= 0.0));
}

#[test]
fn horizon_perfect_oracle_scores_zero() {
    // A forecaster that reproduces the truth exactly gives ratio 0; here
    // the series is an exact AR(1) process so the fitted AR(1) recursion
    // is nearly perfect on the noiseless variant.
    let mut spec = small_spec(ExperimentKind::Horizon, vec![ModelKind::Ar(1)]);
    spec.dataset = DatasetManifest {
        source: DataSource::Gbm {
            length: 360,
            drift: 0.001,
            vol: 0.0, // deterministic exponential growth
            seed: 1,
        },
        normalize: true,
        scaler: None,
        split: SplitSpec {
            k: 5,
            n_train: 250,
            n_test: 100,
        },
    };
    spec.horizon = 10;
    let table = horizon_eval(&spec).unwrap();
    // Deterministic growth: AR(1) captures it almost exactly, the
    // martingale lags behind. The ratio collapses toward zero.
    assert!(table.cells[0][0].value < 0.05, "{}", table.cells[0][0].value);
}

#[test]
fn horizon_rejects_degenerate_constant_test_region() {
    let mut spec = small_spec(ExperimentKind::Horizon, vec![ModelKind::Ar(0)]);
    spec.dataset = DatasetManifest {
        source: DataSource::Gbm {
            length: 360,
            drift: 0.0,
            vol: 0.0, // constant series
            seed: 1,
        },
        normalize: false,
        scaler: None,
        split: SplitSpec {
            k: 5,
            n_train: 250,
            n_test: 100,
        },
    };
    spec.horizon = 10;
    match horizon_eval(&spec) {
        Err(ExperimentError::ZeroBaseline) => {}
        other => panic!("expected ZeroBaseline, got {other:?}"),
    }
}

#[test]
fn mixture_order_study_emits_dispersion_per_row() {
    let mut spec = small_spec(ExperimentKind::MixtureOrder, vec![]);
    spec.m_values = vec![1, 2];
    spec.train.iterations = 40;
    let table = mixture_order_study(&spec).unwrap();
    assert_eq!(table.row_labels, vec!["m=1", "m=2"]);
    for row in &table.cells {
        assert!(row[0].dispersion.is_some());
        for sv in &row[0].per_seed {
            assert!(sv.dispersion.is_some());
        }
    }
}

#[test]
fn mixture_order_m1_cell_matches_standalone_run() {
    let mut spec = small_spec(ExperimentKind::MixtureOrder, vec![]);
    spec.m_values = vec![1];
    spec.seeds = vec![7];
    spec.train.iterations = 40;
    let table = mixture_order_study(&spec).unwrap();

    // Standalone: train the same configuration by hand and evaluate.
    let (series, split, _) = spec.dataset.realize().unwrap();
    let cfg = TrainConfig {
        seed: 7,
        m: 1,
        ..spec.train.clone()
    };
    let model = train_model(ModelKind::MdCgan, &series, &split, &cfg).unwrap();
    let mut rng = Rng::with_stream(7, stream_id(&["mstudy", "m=1"]));
    let posteriors: Vec<_> = split
        .test
        .inputs
        .iter()
        .map(|x| {
            model
                .predict(x, spec.samples, &mut rng)
                .unwrap()
                .posterior
                .unwrap()
        })
        .collect();
    let (mean, _) = nll_stats(&posteriors, &split.test.targets).unwrap();
    assert_eq!(table.cells[0][0].value.to_bits(), mean.to_bits());
}

#[test]
fn density_grids_emitted_when_requested() {
    let mut spec = small_spec(ExperimentKind::MixtureOrder, vec![]);
    spec.m_values = vec![1];
    spec.seeds = vec![1, 2];
    spec.train.iterations = 40;
    spec.density_resolution = Some(200);
    let table = mixture_order_study(&spec).unwrap();
    // One grid per row, for the first seed only.
    assert_eq!(table.density_grids.len(), 1);
    assert_eq!(table.density_grids[0].name, "m=1");
    assert_eq!(table.density_grids[0].grid.y_grid.len(), 200);
}

#[test]
fn csv_mirrors_the_table() {
    let spec = small_spec(ExperimentKind::NoiseSweep, vec![ModelKind::Ar(0)]);
    let table = noise_sweep(&spec).unwrap();
    let csv = table.to_csv();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "model,0% noise,10% noise"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("ar0,"));
    let reported: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(reported.to_bits(), table.cells[0][0].value.to_bits());
}
