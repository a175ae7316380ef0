use serde::{Deserialize, Serialize};

use super::DataError;

/// Affine map recorded when a series is normalized to [0,1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub min: f64,
    pub max: f64,
}

impl Scaler {
    pub fn apply(&self, v: f64) -> f64 {
        (v - self.min) / (self.max - self.min)
    }

    pub fn invert(&self, v: f64) -> f64 {
        v * (self.max - self.min) + self.min
    }
}

/// Ordered real-valued observations. Values above the recorded maximum
/// normalize to > 1; that is allowed and up to the caller to flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub name: String,
    pub values: Vec<f64>,
    pub scaler: Option<Scaler>,
}

impl TimeSeries {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self, DataError> {
        if values.is_empty() {
            return Err(DataError::EmptySeries);
        }
        let name = name.into();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(DataError::NonFinite {
                context: format!(" {name:?}"),
            });
        }
        Ok(Self {
            name,
            values,
            scaler: None,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn range(&self) -> f64 {
        self.max() - self.min()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Population variance.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / self.len() as f64
    }

    /// Affine map of the whole series onto [0,1], recording the scaler.
    pub fn normalized(&self) -> Result<TimeSeries, DataError> {
        let scaler = Scaler {
            min: self.min(),
            max: self.max(),
        };
        if !(scaler.max > scaler.min) {
            return Err(DataError::ConstantSeries);
        }
        self.normalized_with(scaler)
    }

    /// Applies an existing scaler (e.g. one fitted elsewhere).
    pub fn normalized_with(&self, scaler: Scaler) -> Result<TimeSeries, DataError> {
        if !(scaler.max > scaler.min) {
            return Err(DataError::ConstantSeries);
        }
        Ok(TimeSeries {
            name: self.name.clone(),
            values: self.values.iter().map(|&v| scaler.apply(v)).collect(),
            scaler: Some(scaler),
        })
    }

    /// Inverts a recorded normalization; identity if none was recorded.
    pub fn denormalized(&self) -> TimeSeries {
        match self.scaler {
            None => self.clone(),
            Some(s) => TimeSeries {
                name: self.name.clone(),
                values: self.values.iter().map(|&v| s.invert(v)).collect(),
                scaler: None,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_affine_map() {
        let s = TimeSeries::new("t", vec![2.0, 4.0, 6.0]).unwrap();
        let n = s.normalized().unwrap();
        assert_eq!(n.values, vec![0.0, 0.5, 1.0]);
        assert_eq!(n.scaler, Some(Scaler { min: 2.0, max: 6.0 }));
    }

    #[test]
    fn denormalize_inverts() {
        let s = TimeSeries::new("t", vec![3.0, -1.5, 7.25, 0.0]).unwrap();
        let round = s.normalized().unwrap().denormalized();
        for (a, b) in s.values.iter().zip(&round.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn normalizing_normalized_is_identity() {
        let s = TimeSeries::new("t", vec![1.0, 2.0, 5.0]).unwrap();
        let n = s.normalized().unwrap();
        let again = n.normalized_with(Scaler { min: 0.0, max: 1.0 }).unwrap();
        for (a, b) in n.values.iter().zip(&again.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn value_above_train_max_exceeds_one() {
        let s = TimeSeries::new("t", vec![0.0, 10.0]).unwrap();
        let scaler = s.normalized().unwrap().scaler.unwrap();
        let test = TimeSeries::new("u", vec![12.0]).unwrap();
        let n = test.normalized_with(scaler).unwrap();
        assert!(n.values[0] > 1.0);
    }

    #[test]
    fn constant_series_rejected() {
        let s = TimeSeries::new("t", vec![3.0, 3.0, 3.0]).unwrap();
        assert!(matches!(s.normalized(), Err(DataError::ConstantSeries)));
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(TimeSeries::new("t", vec![]).is_err());
        assert!(TimeSeries::new("t", vec![1.0, f64::INFINITY]).is_err());
    }
}
