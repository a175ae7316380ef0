//! Probabilistic time-series forecasting built around a conditional GAN
//! whose generator emits Gaussian-mixture posteriors, together with the
//! learned and linear baselines it is benchmarked against and a
//! reproducible experiment harness.
//!
//! Module map:
//! - [`numeric`]: matrices, the five layer kinds, backprop, Adam, seeded RNG.
//! - [`mixture`]: Gaussian-mixture posteriors and their operations.
//! - [`data`]: synthetic generators, CSV ingestion, windowing, noise.
//! - [`models`]: the forecasters (MD-CGAN, CGAN, MDN, SNN, AR) and training.
//! - [`experiments`]: noise sweeps, horizon ratios, mixture-order studies.

pub mod data;
pub mod experiments;
pub mod mixture;
pub mod models;
pub mod numeric;
