//! Subcommand implementations.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use mdcgan::data::{
    gbm, load_csv, mackey_glass, two_regime, ColumnSelector, DataSource, DatasetManifest,
    MackeyGlassParams, SplitSpec, TimeSeries, TwoRegimeParams,
};
use mdcgan::experiments::{
    horizon_eval, mixture_order_study, noise_sweep, ExperimentKind, ExperimentSpec, ResultsTable,
};
use mdcgan::models::{
    train_ar, train_cgan, train_mdcgan, train_mdn, train_snn, Checkpoint, ModelKind, TrainConfig,
    TrainingCurve,
};

use crate::config::{default_spec, parse_models, RunConfig, TrainPatch};
use crate::ExperimentFlags;

/// Output directory precedence: --out flag, then $MDCGAN_OUT, then ./out.
fn resolve_out_dir(flag: Option<&str>) -> PathBuf {
    if let Some(dir) = flag {
        return PathBuf::from(dir);
    }
    if let Ok(dir) = std::env::var("MDCGAN_OUT") {
        if !dir.is_empty() {
            return PathBuf::from(dir);
        }
    }
    PathBuf::from("out")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("cannot create {}", parent.display()))?;
    }
    std::fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn series_csv(series: &TimeSeries) -> String {
    let mut out = String::from("value\n");
    for v in &series.values {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

pub fn generate(
    generator: &str,
    length: usize,
    seed: u64,
    drift: Option<f64>,
    vol: Option<f64>,
    out: Option<String>,
    name: Option<String>,
) -> Result<()> {
    let (series, source) = match generator {
        "mackey-glass" => {
            let params = MackeyGlassParams::default();
            (
                mackey_glass(length, &params)?,
                DataSource::MackeyGlass { length, params },
            )
        }
        "gbm" => {
            let drift = drift.unwrap_or(0.0);
            let vol = vol.unwrap_or(0.01);
            (
                gbm(length, drift, vol, seed)?,
                DataSource::Gbm {
                    length,
                    drift,
                    vol,
                    seed,
                },
            )
        }
        "two-regime" => {
            let params = TwoRegimeParams::default();
            (
                two_regime(length, &params, seed)?,
                DataSource::TwoRegime {
                    length,
                    params,
                    seed,
                },
            )
        }
        other => bail!("unknown generator {other:?} (expected mackey-glass|gbm|two-regime)"),
    };

    let dir = resolve_out_dir(out.as_deref());
    let stem = name.unwrap_or_else(|| generator.to_string());
    let csv_path = dir.join(format!("{stem}.csv"));
    let manifest_path = dir.join(format!("{stem}.manifest.json"));

    write_file(&csv_path, &series_csv(&series))?;
    let manifest = DatasetManifest::new(source, SplitSpec::default());
    let manifest_json = serde_json::to_string_pretty(&manifest)?;
    write_file(&manifest_path, &manifest_json)?;
    println!(
        "wrote {} ({} rows) and {}",
        csv_path.display(),
        series.len(),
        manifest_path.display()
    );
    Ok(())
}

fn curve_csv(curve: &TrainingCurve) -> String {
    let mut out = String::from("iteration,loss,disc_loss,sample_mse\n");
    for rec in curve {
        out.push_str(&format!(
            "{},{},{},{}\n",
            rec.iteration,
            rec.loss,
            rec.disc_loss.map(|d| d.to_string()).unwrap_or_default(),
            rec.sample_mse
        ));
    }
    out
}

#[allow(clippy::too_many_arguments)]
pub fn train(
    model: &str,
    data: &str,
    column: &str,
    order: Option<usize>,
    config_path: Option<&str>,
    n_train: Option<usize>,
    n_test: Option<usize>,
    out: Option<String>,
    flags: &TrainPatch,
) -> Result<()> {
    let mut cfg = TrainConfig::default();
    if let Some(path) = config_path {
        let file = RunConfig::load(path)?;
        if let Some(train) = &file.train {
            train.apply(&mut cfg);
        }
    }
    flags.apply(&mut cfg);
    cfg.validate()?;

    let raw = load_csv(data, &ColumnSelector::parse(column))?;
    let series = raw.normalized()?;

    // A trailing region is held out so the training data matches what
    // the experiment harness would use on the same split sizes; by
    // default five sixths of the usable pairs train the model.
    let usable = series.len().saturating_sub(cfg.k);
    if usable < 2 {
        bail!("series too short for k = {}", cfg.k);
    }
    let n_train = n_train.unwrap_or((usable * 5 / 6).max(1));
    let n_test = n_test.unwrap_or((usable.saturating_sub(n_train)).max(1));
    let split = mdcgan::data::window_split(&series, cfg.k, n_train, n_test)?;

    let kind: ModelKind = if model == "ar" {
        ModelKind::Ar(order.unwrap_or(0))
    } else {
        model.parse().map_err(|e: String| anyhow::anyhow!(e))?
    };

    let started = std::time::Instant::now();
    let (forecaster, curve) = match kind {
        ModelKind::Ar(p) => {
            let region = TimeSeries::new(
                series.name.clone(),
                series.values[..split.first_test_target].to_vec(),
            )?;
            (train_ar(&region, p, &cfg)?, TrainingCurve::new())
        }
        ModelKind::Snn => train_snn(&split.train, &cfg)?,
        ModelKind::Mdn => train_mdn(&split.train, &cfg)?,
        ModelKind::Cgan => train_cgan(&split.train, &cfg)?,
        ModelKind::MdCgan => train_mdcgan(&split.train, &cfg)?,
    };
    let elapsed = started.elapsed();

    let dir = resolve_out_dir(out.as_deref());
    let ckpt_path = dir.join(format!("{kind}.checkpoint.json"));
    let curve_path = dir.join(format!("{kind}.curve.csv"));
    write_file(&ckpt_path, &Checkpoint::new(forecaster).to_json()?)?;
    write_file(&curve_path, &curve_csv(&curve))?;
    println!(
        "trained {kind} in {elapsed:.2?} ({} iterations); wrote {} and {}",
        curve.len(),
        ckpt_path.display(),
        curve_path.display()
    );
    Ok(())
}

fn dataset_from_flags(flags: &ExperimentFlags, spec: &mut ExperimentSpec) -> Result<()> {
    let d = &flags.dataset;
    if let Some(name) = &d.dataset {
        let length = d.length.unwrap_or(2405);
        let seed = d.data_seed.unwrap_or(0);
        spec.dataset.source = match name.as_str() {
            "mackey-glass" => DataSource::MackeyGlass {
                length,
                params: MackeyGlassParams::default(),
            },
            "gbm" => DataSource::Gbm {
                length,
                drift: d.drift.unwrap_or(0.0),
                vol: d.vol.unwrap_or(0.01),
                seed,
            },
            "two-regime" => DataSource::TwoRegime {
                length,
                params: TwoRegimeParams::default(),
                seed,
            },
            path => DataSource::Csv {
                path: path.to_string(),
                column: d.column.clone().unwrap_or_else(|| "0".to_string()),
                sha256: None,
            },
        };
    }
    if let Some(n) = d.n_train {
        spec.dataset.split.n_train = n;
    }
    if let Some(n) = d.n_test {
        spec.dataset.split.n_test = n;
    }
    if d.no_normalize {
        spec.dataset.normalize = false;
    }
    spec.dataset.split.k = spec.train.k;
    Ok(())
}

pub fn experiment(kind: ExperimentKind, flags: &ExperimentFlags) -> Result<()> {
    // Precedence: defaults, then the config file, then flags.
    let mut spec = default_spec(kind);
    if let Some(path) = &flags.config {
        RunConfig::load(path)?.apply(&mut spec)?;
    }
    if let Some(models) = &flags.models {
        spec.models = parse_models(models)?;
    }
    if let Some(noise) = &flags.noise {
        spec.noise_levels = noise.clone();
    }
    if let Some(h) = flags.horizon {
        spec.horizon = h;
    }
    if flags.endpoint_only {
        spec.endpoint_only = true;
    }
    if let Some(m) = &flags.m_values {
        spec.m_values = m.clone();
    }
    if let Some(seeds) = &flags.seeds {
        spec.seeds = seeds.clone();
    }
    if let Some(s) = flags.samples {
        spec.samples = s;
    }
    if let Some(r) = flags.density_resolution {
        spec.density_resolution = Some(r);
    }
    flags.train.to_patch().apply(&mut spec.train);
    dataset_from_flags(flags, &mut spec)?;
    spec.validate()?;

    if let Some(jobs) = flags.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }

    let started = std::time::Instant::now();
    let table = match kind {
        ExperimentKind::NoiseSweep => noise_sweep(&spec)?,
        ExperimentKind::Horizon => horizon_eval(&spec)?,
        ExperimentKind::MixtureOrder => mixture_order_study(&spec)?,
    };
    let elapsed = started.elapsed();

    let stem = match kind {
        ExperimentKind::NoiseSweep => "sweep",
        ExperimentKind::Horizon => "horizon",
        ExperimentKind::MixtureOrder => "mstudy",
    };
    let dir = resolve_out_dir(flags.out.as_deref());
    let json_path = dir.join(format!("{stem}.json"));
    let csv_path = dir.join(format!("{stem}.csv"));
    write_file(&json_path, &table.to_json()?)?;
    write_file(&csv_path, &table.to_csv())?;
    println!("{}", render_table(&table));
    println!(
        "finished in {elapsed:.2?}; wrote {} and {}",
        json_path.display(),
        csv_path.display()
    );
    Ok(())
}

/// Fixed-width text rendering of a results table.
pub fn render_table(table: &ResultsTable) -> String {
    let mut out = String::new();
    out.push_str(&table.title);
    out.push('\n');

    let fmt_cell = |cell: &mdcgan::experiments::Cell| match cell.dispersion {
        Some(d) => format!("{:.4} ({:.2})", cell.value, d),
        None => format!("{:.6}", cell.value),
    };

    let mut widths: Vec<usize> = table.col_labels.iter().map(|c| c.len()).collect();
    for row in &table.cells {
        for (j, cell) in row.iter().enumerate() {
            widths[j] = widths[j].max(fmt_cell(cell).len());
        }
    }
    let label_width = table
        .row_labels
        .iter()
        .map(|l| l.len())
        .max()
        .unwrap_or(5)
        .max(5);

    out.push_str(&format!("{:label_width$}", "model"));
    for (c, w) in table.col_labels.iter().zip(&widths) {
        out.push_str(&format!("  {c:>w$}"));
    }
    out.push('\n');
    for (label, row) in table.row_labels.iter().zip(&table.cells) {
        out.push_str(&format!("{label:label_width$}"));
        for (cell, w) in row.iter().zip(&widths) {
            out.push_str(&format!("  {:>w$}", fmt_cell(cell)));
        }
        out.push('\n');
    }
    out.push_str(&format!("provenance hash: {}\n", table.metadata.content_hash));
    out
}

pub fn report(results: &str, format: &str, grid_dir: Option<&str>) -> Result<()> {
    let json = std::fs::read_to_string(results)
        .with_context(|| format!("cannot read results file {results}"))?;
    let table = ResultsTable::from_json(&json)?;

    let rendered = match format {
        "table" => render_table(&table),
        "csv" => table.to_csv(),
        other => bail!("unknown format {other:?} (expected table|csv)"),
    };

    if let Some(dir) = grid_dir {
        if table.density_grids.is_empty() {
            bail!(
                "results file has no density grids; re-run the study with --density-resolution"
            );
        }
        let dir = PathBuf::from(dir);
        for named in &table.density_grids {
            let grid_path = dir.join(format!("{}.density.csv", named.name));
            let truth_path = dir.join(format!("{}.truth.csv", named.name));
            write_file(&grid_path, &named.grid.to_csv())?;
            write_file(&truth_path, &named.grid.truths_csv())?;
            println!("wrote {} and {}", grid_path.display(), truth_path.display());
        }
    }

    print!("{rendered}");
    Ok(())
}
