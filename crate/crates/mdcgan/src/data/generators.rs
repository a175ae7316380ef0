//! Synthetic series generators.

use serde::{Deserialize, Serialize};

use super::{DataError, TimeSeries};
use crate::numeric::Rng;

/// Delay-differential parameters for
/// dy/dt = β·y(t−τ) / (1 + y(t−τ)^n) − γ·y(t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MackeyGlassParams {
    pub beta: f64,
    pub gamma: f64,
    pub tau: f64,
    pub n_exp: f64,
    pub dt: f64,
    pub initial: f64,
}

impl Default for MackeyGlassParams {
    fn default() -> Self {
        // Canonical chaotic regime.
        Self {
            beta: 0.2,
            gamma: 0.1,
            tau: 17.0,
            n_exp: 10.0,
            dt: 0.1,
            initial: 1.2,
        }
    }
}

/// Subsampled points discarded as the integration transient, in output
/// (unit-time) samples.
const MG_TRANSIENT: usize = 1000;

fn near_integer(x: f64) -> Option<usize> {
    let r = x.round();
    if (x - r).abs() < 1e-9 && r >= 1.0 {
        Some(r as usize)
    } else {
        None
    }
}

/// Integrates the delay equation with fourth-order Runge-Kutta on a fixed
/// grid of step `dt`, using four-point interpolation for the half-step
/// delayed values, then subsamples every 1/dt steps after discarding a
/// 1000-sample transient. Constant history `initial` for t ≤ 0.
pub fn mackey_glass(length: usize, params: &MackeyGlassParams) -> Result<TimeSeries, DataError> {
    if length == 0 {
        return Err(DataError::InvalidParam("length must be >= 1".into()));
    }
    let p = *params;
    if !(p.dt > 0.0) || !(p.tau > 0.0) || p.beta < 0.0 || p.gamma < 0.0 || !(p.n_exp > 0.0) {
        return Err(DataError::InvalidParam(format!("bad Mackey-Glass parameters: {p:?}")));
    }
    let delay_steps = near_integer(p.tau / p.dt)
        .ok_or_else(|| DataError::InvalidParam(format!("tau/dt = {} is not an integer", p.tau / p.dt)))?;
    let per_unit = near_integer(1.0 / p.dt)
        .ok_or_else(|| DataError::InvalidParam(format!("1/dt = {} is not an integer", 1.0 / p.dt)))?;

    let total_units = MG_TRANSIENT + length;
    let total_steps = total_units * per_unit;
    // traj[i] holds y at t = (i - delay_steps)·dt; the first delay_steps+1
    // entries are the constant history.
    let mut traj = Vec::with_capacity(delay_steps + total_steps + 1);
    traj.resize(delay_steps + 1, p.initial);

    let f = |y: f64, y_delayed: f64| -> f64 {
        p.beta * y_delayed / (1.0 + y_delayed.powf(p.n_exp)) - p.gamma * y
    };
    // Four-point midpoint interpolation between grid values j and j+1.
    let midpoint = |traj: &[f64], j: usize| -> f64 {
        let a = traj[j.saturating_sub(1)];
        let b = traj[j];
        let c = traj[j + 1];
        let d = traj[j + 2];
        (-a + 9.0 * b + 9.0 * c - d) / 16.0
    };

    for step in 0..total_steps {
        let i = delay_steps + step;
        let y = traj[i];
        let j = i - delay_steps;
        let yd0 = traj[j];
        let yd_mid = midpoint(&traj, j);
        let yd1 = traj[j + 1];

        let k1 = f(y, yd0);
        let k2 = f(y + 0.5 * p.dt * k1, yd_mid);
        let k3 = f(y + 0.5 * p.dt * k2, yd_mid);
        let k4 = f(y + p.dt * k3, yd1);
        let next = y + p.dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if !next.is_finite() {
            return Err(DataError::NonFinite {
                context: format!(" mackey-glass at step {step}"),
            });
        }
        traj.push(next);
    }

    let values: Vec<f64> = (MG_TRANSIENT..total_units)
        .map(|s| traj[delay_steps + s * per_unit])
        .collect();
    TimeSeries::new("mackey-glass", values)
}

/// Geometric Brownian path S_{t+1} = S_t·exp((drift − vol²/2) + vol·ξ),
/// unit time step, S_0 = 1.
pub fn gbm(length: usize, drift: f64, vol: f64, seed: u64) -> Result<TimeSeries, DataError> {
    if length == 0 {
        return Err(DataError::InvalidParam("length must be >= 1".into()));
    }
    if vol < 0.0 {
        return Err(DataError::InvalidParam("vol must be >= 0".into()));
    }
    let mut rng = Rng::from_seed(seed);
    let mut values = Vec::with_capacity(length);
    let mut s = 1.0_f64;
    values.push(s);
    for _ in 1..length {
        let xi = rng.next_normal();
        s *= (drift - 0.5 * vol * vol + vol * xi).exp();
        values.push(s);
    }
    TimeSeries::new("gbm", values)
}

/// Two-regime switching series: each step picks one of two levels and
/// adds Gaussian noise around it, producing a bimodal conditional
/// distribution for the next value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TwoRegimeParams {
    pub low: f64,
    pub high: f64,
    pub noise_std: f64,
    pub switch_prob: f64,
}

impl Default for TwoRegimeParams {
    fn default() -> Self {
        Self {
            low: 0.25,
            high: 0.75,
            noise_std: 0.03,
            switch_prob: 0.5,
        }
    }
}

pub fn two_regime(length: usize, params: &TwoRegimeParams, seed: u64) -> Result<TimeSeries, DataError> {
    if length == 0 {
        return Err(DataError::InvalidParam("length must be >= 1".into()));
    }
    let p = *params;
    if !(0.0..=1.0).contains(&p.switch_prob) || !(p.noise_std >= 0.0) {
        return Err(DataError::InvalidParam(format!("bad two-regime parameters: {p:?}")));
    }
    let mut rng = Rng::from_seed(seed);
    let mut high = false;
    let mut values = Vec::with_capacity(length);
    for _ in 0..length {
        if rng.next_uniform() < p.switch_prob {
            high = !high;
        }
        let level = if high { p.high } else { p.low };
        values.push(level + rng.normal(0.0, p.noise_std));
    }
    TimeSeries::new("two-regime", values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mackey_glass_zero_dynamics_is_constant() {
        let params = MackeyGlassParams {
            beta: 0.0,
            gamma: 0.0,
            ..Default::default()
        };
        let s = mackey_glass(50, &params).unwrap();
        assert!(s.values.iter().all(|&v| (v - 1.2).abs() < 1e-12));
    }

    #[test]
    fn mackey_glass_default_bounded_after_transient() {
        let s = mackey_glass(2500, &MackeyGlassParams::default()).unwrap();
        assert_eq!(s.len(), 2500);
        assert!(s.values.iter().all(|&v| v > 0.0 && v < 1.5), "min {} max {}", s.min(), s.max());
        // Chaotic, so it should actually move around.
        assert!(s.range() > 0.3);
    }

    #[test]
    fn mackey_glass_deterministic() {
        let a = mackey_glass(300, &MackeyGlassParams::default()).unwrap();
        let b = mackey_glass(300, &MackeyGlassParams::default()).unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn mackey_glass_integration_converges_under_dt_refinement() {
        // Chaos amplifies any integration difference exponentially, so the
        // step-halving comparison is meaningful over a bounded horizon.
        let coarse = mackey_glass(60, &MackeyGlassParams::default()).unwrap();
        let fine = mackey_glass(
            60,
            &MackeyGlassParams {
                dt: 0.05,
                ..Default::default()
            },
        )
        .unwrap();
        let sup = coarse
            .values
            .iter()
            .zip(&fine.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(sup < 1e-3, "sup-norm {sup}");
    }

    #[test]
    fn mackey_glass_rejects_non_integral_ratios() {
        let p = MackeyGlassParams {
            tau: 17.05,
            ..Default::default()
        };
        assert!(mackey_glass(10, &p).is_err());
        let p = MackeyGlassParams {
            dt: 0.3,
            ..Default::default()
        };
        assert!(mackey_glass(10, &p).is_err());
    }

    #[test]
    fn gbm_degenerate_cases() {
        let s = gbm(100, 0.0, 0.0, 1).unwrap();
        assert!(s.values.iter().all(|&v| (v - 1.0).abs() < 1e-12));

        let d = 0.01;
        let s = gbm(100, d, 0.0, 1).unwrap();
        for (t, &v) in s.values.iter().enumerate() {
            assert!((v - (d * t as f64).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn gbm_log_return_vol_matches() {
        let vol = 0.02;
        let s = gbm(100_001, 0.0, vol, 7).unwrap();
        let rets: Vec<f64> = s.values.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
        let mean = rets.iter().sum::<f64>() / rets.len() as f64;
        let var = rets.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / rets.len() as f64;
        let std = var.sqrt();
        assert!((std - vol).abs() / vol < 0.02, "std {std}");
    }

    #[test]
    fn gbm_seeded_determinism() {
        assert_eq!(gbm(500, 0.0, 0.1, 3).unwrap(), gbm(500, 0.0, 0.1, 3).unwrap());
        assert_ne!(gbm(500, 0.0, 0.1, 3).unwrap(), gbm(500, 0.0, 0.1, 4).unwrap());
    }

    #[test]
    fn two_regime_occupies_both_levels() {
        let s = two_regime(4000, &TwoRegimeParams::default(), 11).unwrap();
        let low = s.values.iter().filter(|&&v| v < 0.5).count();
        let high = s.len() - low;
        assert!(low > 1000 && high > 1000, "low {low} high {high}");
    }
}
