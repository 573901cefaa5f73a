//! Adversarial PPG → ECG translation toolkit.
//!
//! The crate is organised along the pipeline:
//!
//! - [`signal`]: resampling, zero-phase bandpass filtering, windowing, min-max
//!   scaling and DFT magnitude spectra.
//! - [`dataset`]: the on-disk interchange format, subject-disjoint splits,
//!   aligned PPG/ECG pair construction and seeded batching.
//! - [`model`]: a small reverse-mode tensor tape plus the attention U-Net
//!   generator and the convolutional discriminator built on it.
//! - [`training`]: adversarial and spectral losses, Adam, the learning-rate
//!   schedule, the alternating update loop and seed sweeps.
//! - [`eval`]: QRS and PPG systolic peak detection, heart-rate MAPE, failure
//!   accounting and seed-distribution statistics.
//! - [`toy`]: a synthetic paired corpus for smoke runs and demos.

pub mod dataset;
pub mod error;
pub mod eval;
pub mod model;
pub mod signal;
pub mod toy;
pub mod training;

pub use error::{Error, Result};
