//! Sliding one-step windows and the train/test split.

use serde::{Deserialize, Serialize};

use super::{DataError, TimeSeries};

/// Supervised pairs: each input is the k observations immediately
/// preceding its target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowedDataset {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    pub k: usize,
    pub horizon: usize,
}

impl WindowedDataset {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

/// One-step windowed pairs over the whole series: pair i is
/// (values[i..i+k], values[i+k]).
pub fn window_pairs(series: &TimeSeries, k: usize) -> Result<WindowedDataset, DataError> {
    if k == 0 {
        return Err(DataError::InvalidParam("window length k must be >= 1".into()));
    }
    if series.len() < k + 1 {
        return Err(DataError::TooShort {
            len: series.len(),
            needed: k + 1,
        });
    }
    let n = series.len() - k;
    let mut inputs = Vec::with_capacity(n);
    let mut targets = Vec::with_capacity(n);
    for i in 0..n {
        inputs.push(series.values[i..i + k].to_vec());
        targets.push(series.values[i + k]);
    }
    Ok(WindowedDataset {
        inputs,
        targets,
        k,
        horizon: 1,
    })
}

/// A chronological train/test split of windowed pairs. The test target
/// region starts strictly after the last training target; test input
/// windows may reach back at most k values before the first test target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub train: WindowedDataset,
    pub test: WindowedDataset,
    pub k: usize,
    /// Index into the source series of the first test target.
    pub first_test_target: usize,
}

/// Builds `n_train` one-step training pairs followed by `n_test`
/// sequential test pairs.
pub fn window_split(
    series: &TimeSeries,
    k: usize,
    n_train: usize,
    n_test: usize,
) -> Result<Split, DataError> {
    if n_train == 0 || n_test == 0 {
        return Err(DataError::InvalidParam("n_train and n_test must be >= 1".into()));
    }
    let needed = n_train + n_test + k;
    if series.len() < needed {
        return Err(DataError::TooShort {
            len: series.len(),
            needed,
        });
    }
    let all = window_pairs(series, k)?;
    let train = WindowedDataset {
        inputs: all.inputs[..n_train].to_vec(),
        targets: all.targets[..n_train].to_vec(),
        k,
        horizon: 1,
    };
    let test = WindowedDataset {
        inputs: all.inputs[n_train..n_train + n_test].to_vec(),
        targets: all.targets[n_train..n_train + n_test].to_vec(),
        k,
        horizon: 1,
    };
    Ok(Split {
        train,
        test,
        k,
        first_test_target: k + n_train,
    })
}
