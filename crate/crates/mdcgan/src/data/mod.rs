//! Dataset construction: synthetic generators, CSV ingestion,
//! normalization, windowing, splitting and test-set noise injection.

mod generators;
mod ingest;
mod manifest;
mod noise;
mod series;
mod window;

pub use generators::{gbm, mackey_glass, two_regime, MackeyGlassParams, TwoRegimeParams};
pub use ingest::{load_csv, ColumnSelector};
pub use manifest::{DataSource, DatasetManifest, SplitSpec};
pub use noise::{add_noise, with_noisy_tail};
pub use series::{Scaler, TimeSeries};
pub use window::{window_pairs, window_split, Split, WindowedDataset};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("series must contain at least one value")]
    EmptySeries,
    #[error("non-finite value in series{}", .context)]
    NonFinite { context: String },
    #[error("cannot normalize a constant series (max == min)")]
    ConstantSeries,
    #[error("series of length {len} too short: need at least {needed}")]
    TooShort { len: usize, needed: usize },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("cannot open {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv parse failure in {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("{path}:{line}: cannot parse {field:?} as a number")]
    BadRow {
        path: String,
        line: usize,
        field: String,
    },
    #[error("no numeric rows in {path}")]
    NoNumericRows { path: String },
    #[error("column {column:?} not found in {path}")]
    MissingColumn { path: String, column: String },
    #[error("column {column:?} is ambiguous in {path}: appears {count} times")]
    AmbiguousColumn {
        path: String,
        column: String,
        count: usize,
    },
}
