//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each exported function takes plain numbers and returns a JSON string; the
//! `*_data` functions return the same values as Rust structs.

use ppg2ecg::eval::{detect_ppg_peaks, detect_qrs, heart_rate};
use ppg2ecg::model::Tensor;
use ppg2ecg::signal::{BandpassSpec, SpectrumPlan, MODEL_RATE_HZ};
use ppg2ecg::toy::{toy_pair, ToyConfig};
use ppg2ecg::training::FreqLoss;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Samples in every demo window (4 s at the model rate).
pub const WINDOW: usize = 512;

#[derive(Debug, Clone, Serialize)]
pub struct FilterResponse {
    pub channel: String,
    pub low_hz: f64,
    pub high_hz: f64,
    pub freq_hz: Vec<f64>,
    /// Zero-phase (forward-backward) response.
    pub gain_db: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralLossDemo {
    pub ecg: Vec<f64>,
    pub shifted: Vec<f64>,
    /// Bins 1..=WINDOW/2.
    pub spectrum: Vec<f64>,
    pub shifted_spectrum: Vec<f64>,
    /// L_freq(ecg, rotated ecg), zero up to rounding.
    pub loss_shifted: f64,
    /// L_freq(ecg, rotated ecg + noise).
    pub loss_noisy: f64,
    /// L_freq(ecg, silence), for scale.
    pub loss_silent: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectorDemo {
    pub rate: f64,
    pub ppg: Vec<f64>,
    pub ecg: Vec<f64>,
    pub ppg_peaks: Vec<usize>,
    pub ecg_peaks: Vec<usize>,
    pub hr_ppg: Option<f64>,
    pub hr_ecg: Option<f64>,
}

fn to_json<T: Serialize>(v: &Result<T, String>) -> String {
    match v {
        Ok(v) => serde_json::to_string(v).unwrap_or_else(|e| error_json(&e.to_string())),
        Err(e) => error_json(e),
    }
}

fn error_json(msg: &str) -> String {
    serde_json::json!({ "error": msg }).to_string()
}

fn add_noise(x: &mut [f64], std: f64, seed: u64) {
    if std <= 0.0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, std).expect("positive std");
    x.iter_mut().for_each(|v| *v += normal.sample(&mut rng));
}

fn pair(bpm: f64) -> Result<ppg2ecg::dataset::SegmentPair, String> {
    if !(20.0..=300.0).contains(&bpm) {
        return Err(format!("heart rate {bpm} bpm outside 20-300"));
    }
    Ok(toy_pair(&ToyConfig { length: WINDOW, ..ToyConfig::default() }, bpm, 0.3, 0))
}

/// Gain of the PPG (`"ppg"`) or ECG (`"ecg"`) bandpass from 0 Hz to Nyquist.
pub fn filter_response_data(channel: &str, points: usize) -> Result<FilterResponse, String> {
    let spec = match channel {
        "ppg" => BandpassSpec::ppg(),
        "ecg" => BandpassSpec::ecg(),
        other => return Err(format!("unknown channel {other:?}")),
    };
    let filter = spec.design(MODEL_RATE_HZ).map_err(|e| e.to_string())?;
    let points = points.clamp(2, 4096);
    let nyquist = MODEL_RATE_HZ / 2.0;
    let freq_hz: Vec<f64> = (0..points).map(|i| nyquist * i as f64 / (points - 1) as f64).collect();
    let gain_db = freq_hz
        .iter()
        .map(|&f| (40.0 * filter.gain(f, MODEL_RATE_HZ).log10()).max(-200.0))
        .collect();
    Ok(FilterResponse { channel: channel.to_string(), low_hz: spec.low_hz, high_hz: spec.high_hz, freq_hz, gain_db })
}

/// Spectral loss between a toy ECG and a circularly shifted copy of it.
pub fn spectral_loss_data(bpm: f64, shift: usize, noise_std: f64, seed: u64) -> Result<SpectralLossDemo, String> {
    let ecg = pair(bpm)?.ecg.samples;
    let mut shifted = ecg.clone();
    shifted.rotate_right(shift % WINDOW);
    let mut noisy = shifted.clone();
    add_noise(&mut noisy, noise_std, seed);
    let loss = FreqLoss::new(WINDOW);
    let t = |x: &[f64]| Tensor::from_signals([x]).map_err(|e| e.to_string());
    let real = t(&ecg)?;
    let l = |x: &[f64]| loss.loss(&t(x)?, &real).map_err(|e| e.to_string());
    let plan = SpectrumPlan::new(WINDOW);
    let mags = |x: &[f64]| plan.magnitudes(x).0;
    Ok(SpectralLossDemo {
        loss_shifted: l(&shifted)?,
        loss_noisy: l(&noisy)?,
        loss_silent: l(&vec![0.0; WINDOW])?,
        spectrum: mags(&ecg),
        shifted_spectrum: mags(&noisy),
        ecg,
        shifted: noisy,
    })
}

/// QRS and PPG peak detection on a toy pair with additive noise at `snr_db`.
pub fn detect_peaks_data(bpm: f64, snr_db: f64, seed: u64) -> Result<DetectorDemo, String> {
    let p = pair(bpm)?;
    let (mut ppg, mut ecg) = (p.ppg.samples, p.ecg.samples);
    for (x, salt) in [(&mut ppg, 0), (&mut ecg, 1)] {
        let power = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        add_noise(x, (power / 10f64.powf(snr_db / 10.0)).sqrt(), seed.wrapping_mul(2).wrapping_add(salt));
    }
    let rate = MODEL_RATE_HZ;
    let ppg_peaks = detect_ppg_peaks(&ppg, rate);
    let ecg_peaks = detect_qrs(&ecg, rate);
    Ok(DetectorDemo {
        rate,
        hr_ppg: heart_rate(&ppg_peaks, rate),
        hr_ecg: heart_rate(&ecg_peaks, rate),
        ppg,
        ecg,
        ppg_peaks,
        ecg_peaks,
    })
}

#[wasm_bindgen]
pub fn filter_response(channel: &str, points: usize) -> String {
    to_json(&filter_response_data(channel, points))
}

#[wasm_bindgen]
pub fn spectral_loss(bpm: f64, shift: usize, noise_std: f64, seed: u64) -> String {
    to_json(&spectral_loss_data(bpm, shift, noise_std, seed))
}

#[wasm_bindgen]
pub fn detect_peaks(bpm: f64, snr_db: f64, seed: u64) -> String {
    to_json(&detect_peaks_data(bpm, snr_db, seed))
}
