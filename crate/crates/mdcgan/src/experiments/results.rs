//! Results tables with embedded provenance.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{DensityGrid, ExperimentError, ExperimentSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedValue {
    pub seed: u64,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dispersion: Option<f64>,
}

/// One table cell: the reported value (median over seeds), an optional
/// dispersion, and every per-seed result behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dispersion: Option<f64>,
    pub per_seed: Vec<SeedValue>,
}

impl Cell {
    /// Builds a cell from per-seed results: the reported value is the
    /// median; the dispersion is carried over from the median seed.
    pub fn from_seeds(mut per_seed: Vec<SeedValue>) -> Self {
        assert!(!per_seed.is_empty());
        let mut sorted: Vec<usize> = (0..per_seed.len()).collect();
        sorted.sort_by(|&a, &b| {
            per_seed[a]
                .value
                .partial_cmp(&per_seed[b].value)
                .expect("finite cell values")
        });
        let mid = sorted[sorted.len() / 2];
        let value = if per_seed.len() % 2 == 1 {
            per_seed[mid].value
        } else {
            let lo = sorted[sorted.len() / 2 - 1];
            0.5 * (per_seed[lo].value + per_seed[mid].value)
        };
        let dispersion = per_seed[mid].dispersion;
        per_seed.sort_by_key(|s| s.seed);
        Self {
            value,
            dispersion,
            per_seed,
        }
    }
}

/// Full provenance: re-running `spec` reproduces every cell bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMetadata {
    pub spec: ExperimentSpec,
    /// SHA-256 over the canonical JSON of `spec`.
    pub content_hash: String,
}

impl TableMetadata {
    pub fn new(spec: ExperimentSpec) -> Result<Self, ExperimentError> {
        let canonical =
            serde_json::to_string(&spec).map_err(|e| ExperimentError::ResultsIo(e.to_string()))?;
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        Ok(Self {
            spec,
            content_hash: format!("{:x}", hasher.finalize()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedGrid {
    pub name: String,
    pub grid: DensityGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsTable {
    pub title: String,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    /// Row-major: cells[row][col].
    pub cells: Vec<Vec<Cell>>,
    pub metadata: TableMetadata,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub density_grids: Vec<NamedGrid>,
}

impl ResultsTable {
    pub fn to_json(&self) -> Result<String, ExperimentError> {
        serde_json::to_string_pretty(self).map_err(|e| ExperimentError::ResultsIo(e.to_string()))
    }

    pub fn from_json(json: &str) -> Result<Self, ExperimentError> {
        serde_json::from_str(json).map_err(|e| ExperimentError::ResultsIo(e.to_string()))
    }

    /// Flat CSV mirroring the table: rows = models/conditions, columns =
    /// conditions; dispersions, when present, follow the value in
    /// parentheses.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("model");
        for col in &self.col_labels {
            out.push(',');
            out.push_str(col);
        }
        out.push('\n');
        for (label, row) in self.row_labels.iter().zip(&self.cells) {
            out.push_str(label);
            for cell in row {
                out.push(',');
                match cell.dispersion {
                    Some(d) => out.push_str(&format!("{} ({})", cell.value, d)),
                    None => out.push_str(&cell.value.to_string()),
                }
            }
            out.push('\n');
        }
        out
    }

    /// True when every reported value and per-seed value matches bit for
    /// bit.
    pub fn cells_bit_identical(&self, other: &ResultsTable) -> bool {
        if self.row_labels != other.row_labels || self.col_labels != other.col_labels {
            return false;
        }
        self.cells.iter().flatten().zip(other.cells.iter().flatten()).all(|(a, b)| {
            a.value.to_bits() == b.value.to_bits()
                && a.dispersion.map(f64::to_bits) == b.dispersion.map(f64::to_bits)
                && a.per_seed.len() == b.per_seed.len()
                && a.per_seed.iter().zip(&b.per_seed).all(|(x, y)| {
                    x.seed == y.seed
                        && x.value.to_bits() == y.value.to_bits()
                        && x.dispersion.map(f64::to_bits) == y.dispersion.map(f64::to_bits)
                })
        })
    }
}
