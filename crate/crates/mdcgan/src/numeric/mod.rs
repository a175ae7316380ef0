//! Dense linear algebra, the five layer kinds, reverse-mode gradients and
//! the Adam optimizer — just enough machinery to train small MLPs
//! deterministically in 64-bit floats.

mod adam;
mod gradcheck;
mod layer;
mod math;
mod matrix;
mod network;
mod rng;

pub use adam::AdamState;
pub use gradcheck::grad_check;
pub use layer::{BatchNorm, Dense, Dropout, Layer, LeakyRelu, Sigmoid};
pub use math::log_sum_exp;
pub use matrix::Matrix;
pub use network::{Mode, Network};
pub use rng::{stream_id, Rng};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericError {
    #[error("{op}: dimension mismatch, expected {expected:?} but got {got:?}")]
    DimMismatch {
        op: &'static str,
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("{op}: produced a non-finite value")]
    NonFinite { op: &'static str },
    #[error("{op}: empty input")]
    Empty { op: &'static str },
    #[error("backward called before forward")]
    BackwardBeforeForward,
    #[error("batch normalization needs a batch of at least 2 rows in train mode, got {got}")]
    BatchTooSmall { got: usize },
    #[error("invalid layer configuration: {0}")]
    InvalidLayer(String),
    #[error("gradient check requires dropout to be disabled (eval mode or rate 0)")]
    DropoutActive,
}
