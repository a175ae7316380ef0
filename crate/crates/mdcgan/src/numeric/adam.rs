//! Bias-corrected Adam.

use serde::{Deserialize, Serialize};

use super::{Matrix, Network, NumericError};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    t: u64,
    first_moment: Vec<Vec<f64>>,
    second_moment: Vec<Vec<f64>>,
}

impl AdamState {
    pub fn new(lr: f64, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        Self {
            lr,
            beta1,
            beta2,
            epsilon,
            t: 0,
            first_moment: Vec::new(),
            second_moment: Vec::new(),
        }
    }

    /// Steps taken so far; increments by exactly one per `step`.
    pub fn steps(&self) -> u64 {
        self.t
    }

    /// One optimizer step over an ordered list of (param, grad) tensors.
    /// Moment accumulators are zero-initialized lazily from the first call.
    pub fn step(&mut self, tensors: &mut [(&mut Matrix, &Matrix)]) -> Result<(), NumericError> {
        if self.first_moment.is_empty() {
            for (p, _) in tensors.iter() {
                self.first_moment.push(vec![0.0; p.data().len()]);
                self.second_moment.push(vec![0.0; p.data().len()]);
            }
        }
        if self.first_moment.len() != tensors.len() {
            return Err(NumericError::DimMismatch {
                op: "adam step",
                expected: (self.first_moment.len(), 0),
                got: (tensors.len(), 0),
            });
        }
        for ((param, grad), _) in tensors.iter().zip(&self.first_moment) {
            if param.shape() != grad.shape() {
                return Err(NumericError::DimMismatch {
                    op: "adam step",
                    expected: param.shape(),
                    got: grad.shape(),
                });
            }
            grad.ensure_finite("adam step")?;
        }

        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for (i, (param, grad)) in tensors.iter_mut().enumerate() {
            let m = &mut self.first_moment[i];
            let v = &mut self.second_moment[i];
            for ((p, &g), (m, v)) in param
                .data_mut()
                .iter_mut()
                .zip(grad.data())
                .zip(m.iter_mut().zip(v.iter_mut()))
            {
                *m = self.beta1 * *m + (1.0 - self.beta1) * g;
                *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
                let m_hat = *m / bc1;
                let v_hat = *v / bc2;
                *p -= self.lr * m_hat / (v_hat.sqrt() + self.epsilon);
            }
        }
        Ok(())
    }

    /// Convenience: step all parameters of a network.
    pub fn step_network(&mut self, net: &mut Network) -> Result<(), NumericError> {
        let mut tensors = net.param_tensors();
        self.step(&mut tensors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> Matrix {
        Matrix::from_vec(1, 1, vec![v]).unwrap()
    }

    /// Closed-form single Adam step for a scalar parameter.
    fn adam_one_step_oracle(g: f64, lr: f64, b1: f64, b2: f64, eps: f64) -> f64 {
        let m = (1.0 - b1) * g;
        let v = (1.0 - b2) * g * g;
        let m_hat = m / (1.0 - b1);
        let v_hat = v / (1.0 - b2);
        lr * m_hat / (v_hat.sqrt() + eps)
    }

    #[test]
    fn first_step_matches_closed_form() {
        for &g in &[0.5, 1.0, 3.25, 1e-3] {
            let mut state = AdamState::new(0.001, 0.9, 0.999, 1e-7);
            let mut p = scalar(1.0);
            let grad = scalar(g);
            state.step(&mut [(&mut p, &grad)]).unwrap();
            let expected = 1.0 - adam_one_step_oracle(g, 0.001, 0.9, 0.999, 1e-7);
            assert!(
                (p.get(0, 0) - expected).abs() < 1e-12,
                "g={g}: got {} expected {expected}",
                p.get(0, 0)
            );
            // For g not tiny the move is ≈ lr.
            if g > 1e-2 {
                assert!((1.0 - p.get(0, 0) - 0.001).abs() < 1e-6);
            }
            assert_eq!(state.steps(), 1);
        }
    }

    #[test]
    fn zero_gradient_is_noop_but_counts() {
        let mut state = AdamState::new(0.001, 0.9, 0.999, 1e-7);
        let mut p = scalar(0.7);
        let grad = scalar(0.0);
        state.step(&mut [(&mut p, &grad)]).unwrap();
        assert_eq!(p.get(0, 0), 0.7);
        assert_eq!(state.steps(), 1);
    }

    #[test]
    fn two_identical_steps_match_hand_unrolled_recurrence() {
        let (lr, b1, b2, eps) = (0.001, 0.9, 0.999, 1e-7);
        let g = 0.8;
        let mut state = AdamState::new(lr, b1, b2, eps);
        let mut p = scalar(2.0);
        let grad = scalar(g);
        state.step(&mut [(&mut p, &grad)]).unwrap();
        state.step(&mut [(&mut p, &grad)]).unwrap();

        // Hand-unrolled two-step recurrence.
        let mut expected = 2.0;
        let mut m = 0.0;
        let mut v = 0.0;
        for t in 1..=2u32 {
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            let m_hat = m / (1.0 - b1.powi(t as i32));
            let v_hat = v / (1.0 - b2.powi(t as i32));
            expected -= lr * m_hat / (v_hat.sqrt() + eps);
        }
        assert!((p.get(0, 0) - expected).abs() < 1e-15);
    }

    #[test]
    fn non_finite_grads_rejected() {
        let mut state = AdamState::new(0.001, 0.9, 0.999, 1e-7);
        let mut p = scalar(1.0);
        let mut grad = scalar(0.0);
        grad.data_mut()[0] = f64::INFINITY;
        assert!(state.step(&mut [(&mut p, &grad)]).is_err());
    }
}
