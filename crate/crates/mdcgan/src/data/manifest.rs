//! Dataset manifests: a JSON-serializable description sufficient to
//! reconstruct an experiment input bit-exactly.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{
    gbm, load_csv, mackey_glass, two_regime, window_split, ColumnSelector, DataError,
    MackeyGlassParams, Scaler, Split, TimeSeries, TwoRegimeParams,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DataSource {
    MackeyGlass {
        length: usize,
        #[serde(default)]
        params: MackeyGlassParams,
    },
    Gbm {
        length: usize,
        drift: f64,
        vol: f64,
        seed: u64,
    },
    TwoRegime {
        length: usize,
        #[serde(default)]
        params: TwoRegimeParams,
        seed: u64,
    },
    Csv {
        path: String,
        /// Column by header name, or by index when the string is numeric.
        column: String,
        /// Content hash recorded on first use; later realizations verify it.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sha256: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSpec {
    pub k: usize,
    pub n_train: usize,
    pub n_test: usize,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            k: 5,
            n_train: 2000,
            n_test: 400,
        }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub source: DataSource,
    /// Scale the full series onto [0,1] before splitting. The scaler is
    /// fitted on the whole series, which mildly leaks the test range; it
    /// is recorded here so consumers can see exactly what was applied.
    #[serde(default = "default_true")]
    pub normalize: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaler: Option<Scaler>,
    #[serde(default)]
    pub split: SplitSpec,
}

impl DatasetManifest {
    pub fn new(source: DataSource, split: SplitSpec) -> Self {
        Self {
            source,
            normalize: true,
            scaler: None,
            split,
        }
    }

    /// Materializes the series described by `source` (before any
    /// normalization).
    pub fn raw_series(&self) -> Result<TimeSeries, DataError> {
        match &self.source {
            DataSource::MackeyGlass { length, params } => mackey_glass(*length, params),
            DataSource::Gbm {
                length,
                drift,
                vol,
                seed,
            } => gbm(*length, *drift, *vol, *seed),
            DataSource::TwoRegime {
                length,
                params,
                seed,
            } => two_regime(*length, params, *seed),
            DataSource::Csv { path, column, sha256 } => {
                if let Some(expected) = sha256 {
                    let actual = file_sha256(path)?;
                    if &actual != expected {
                        return Err(DataError::InvalidParam(format!(
                            "{path}: content hash {actual} does not match recorded {expected}"
                        )));
                    }
                }
                load_csv(path, &ColumnSelector::parse(column))
            }
        }
    }

    /// Builds the (possibly normalized) series and its train/test split,
    /// and returns the manifest with the applied scaler and any file hash
    /// filled in for the record.
    pub fn realize(&self) -> Result<(TimeSeries, Split, DatasetManifest), DataError> {
        let raw = self.raw_series()?;
        let series = if self.normalize {
            raw.normalized()?
        } else {
            raw
        };
        let split = window_split(&series, self.split.k, self.split.n_train, self.split.n_test)?;
        let mut recorded = self.clone();
        recorded.scaler = series.scaler;
        if let DataSource::Csv { path, sha256, .. } = &mut recorded.source {
            if sha256.is_none() {
                *sha256 = Some(file_sha256(path)?);
            }
        }
        Ok((series, split, recorded))
    }
}

pub(crate) fn file_sha256(path: &str) -> Result<String, DataError> {
    let bytes = std::fs::read(path).map_err(|source| DataError::Io {
        path: path.to_string(),
        source,
    })?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}
