use super::NumericError;

/// log Σ exp(v_i) with max-subtraction, safe for |v_i| up to about 1e6.
pub fn log_sum_exp(values: &[f64]) -> Result<f64, NumericError> {
    if values.is_empty() {
        return Err(NumericError::Empty { op: "log_sum_exp" });
    }
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        // All entries -inf: the sum is zero, its log -inf. Any +inf or NaN
        // input is a caller bug surfaced as NonFinite.
        if values.iter().all(|v| *v == f64::NEG_INFINITY) {
            return Ok(f64::NEG_INFINITY);
        }
        return Err(NumericError::NonFinite { op: "log_sum_exp" });
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    Ok(max + sum.ln())
}
