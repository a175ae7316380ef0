//! The experiment harness: noise-robustness sweeps, long-horizon ratio
//! studies and mixture-order likelihood studies, with full provenance.

mod density;
mod metrics;
mod results;
mod runner;
mod spec;

pub use density::{density_grid, DensityGrid};
pub use metrics::{mse, nll_stats, recursive_forecast};
pub use results::{Cell, ResultsTable, SeedValue, TableMetadata};
pub use runner::{horizon_eval, mixture_order_study, noise_sweep, rerun, train_model};
pub use spec::{ExperimentKind, ExperimentSpec};

use thiserror::Error;

use crate::data::DataError;
use crate::mixture::MixtureError;
use crate::models::ModelError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment specification: {0}")]
    InvalidSpec(String),
    #[error("empty input to {0}")]
    EmptyInput(&'static str),
    #[error("model {model} produced no posterior; log-likelihood metrics need one")]
    NoPosterior { model: String },
    #[error("baseline MSE is zero; ratios are undefined (degenerate constant test data)")]
    ZeroBaseline,
    #[error("cell ({model}, {condition}) failed: {source}")]
    Cell {
        model: String,
        condition: String,
        #[source]
        source: Box<ExperimentError>,
    },
    #[error("results file problem: {0}")]
    ResultsIo(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Mixture(#[from] MixtureError),
}
