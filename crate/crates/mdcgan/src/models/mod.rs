//! The forecasters: MD-CGAN, CGAN, MDN, SNN and linear AR baselines
//! behind one prediction interface, plus their training loops.

mod ar;
mod builders;
mod checkpoint;
mod config;
mod forecaster;
mod gan;
mod losses;
mod simple;
mod training;

pub use ar::{fit_ar, train_ar, ArModel};
pub use builders::{build_discriminator, build_generator};
pub use checkpoint::{Checkpoint, TrainMeta};
pub use config::{DiscContract, GenLoss, SigmaA, TrainConfig};
pub use forecaster::{Forecaster, ModelKind, Prediction};
pub use gan::{mdcgan_disc_loss, mdcgan_gen_loss, train_cgan, train_mdcgan, DiscBatch};
pub use losses::{
    bce_loss, latent_rows_to_params, mixture_nll_loss, mixture_raw_loss, mse_loss, MixtureEval,
};
pub use simple::{train_mdn, train_snn};
pub use training::{IterationRecord, TrainingCurve};

use thiserror::Error;

use crate::data::DataError;
use crate::mixture::MixtureError;
use crate::numeric::NumericError;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("{op}: batch has {rows} rows but {targets} targets")]
    BatchMismatch {
        op: &'static str,
        rows: usize,
        targets: usize,
    },
    #[error("training dataset is empty")]
    EmptyDataset,
    #[error("training diverged (non-finite loss) at iteration {iteration}")]
    Diverged { iteration: usize },
    #[error("window of length {got} is too short for this model (need {needed})")]
    WindowTooShort { got: usize, needed: usize },
    #[error("series of length {got} too short to fit (need {needed})")]
    SeriesTooShort { got: usize, needed: usize },
    #[error("normal equations are singular")]
    SingularSystem,
    #[error("model expects windows of length {expected}, got {got}")]
    WindowWidth { expected: usize, got: usize },
    #[error("sample count must be >= 1")]
    ZeroSamples,
    #[error("checkpoint format problem: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Mixture(#[from] MixtureError),
    #[error(transparent)]
    Data(#[from] DataError),
}
