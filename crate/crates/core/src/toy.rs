//! Synthetic paired corpus: a smoothed pulse train in, a train of sharp
//! spikes out. The spikes sit a fixed latency before each pulse peak, so
//! the target is a deterministic function of the input's beat times and
//! heart rate can be scored exactly as on real data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::SegmentPair;
use crate::model::{DiscriminatorConfig, GeneratorConfig};
use crate::signal::{minmax_scale, Activity, Channel, Segment, MODEL_RATE_HZ};
use crate::training::{Objective, TrainConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyConfig {
    pub pairs: usize,
    pub length: usize,
    pub rate: f64,
    pub bpm: (f64, f64),
    /// Width (standard deviation) of an input pulse.
    pub pulse_s: f64,
    /// Width of an output spike.
    pub spike_s: f64,
    /// Spike lead over the matching pulse.
    pub latency_s: f64,
    pub seed: u64,
}

impl Default for ToyConfig {
    fn default() -> Self {
        ToyConfig {
            pairs: 2000,
            length: 512,
            rate: MODEL_RATE_HZ,
            bpm: (50.0, 120.0),
            pulse_s: 0.08,
            spike_s: 0.015,
            latency_s: 0.15,
            seed: 0,
        }
    }
}

/// Beat times covering `[-1 s, duration + 1 s]` at a fixed rate with a
/// random phase.
fn beat_times(bpm: f64, phase: f64, duration: f64) -> Vec<f64> {
    let rr = 60.0 / bpm;
    let mut t = -1.0 + phase * rr;
    let mut out = Vec::new();
    while t < duration + 1.0 {
        out.push(t);
        t += rr;
    }
    out
}

fn bumps(times: &[f64], width: f64, shift: f64, n: usize, rate: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let t = i as f64 / rate;
            times.iter().map(|&b| (-0.5 * ((t - b - shift) / width).powi(2)).exp()).sum()
        })
        .collect()
}

/// One pair at `bpm`; both channels min-max scaled to `[-1, 1]`.
pub fn toy_pair(cfg: &ToyConfig, bpm: f64, phase: f64, index: usize) -> SegmentPair {
    let duration = cfg.length as f64 / cfg.rate;
    let beats = beat_times(bpm, phase, duration);
    let ppg = minmax_scale(&bumps(&beats, cfg.pulse_s, 0.0, cfg.length, cfg.rate));
    let ecg = minmax_scale(&bumps(&beats, cfg.spike_s, -cfg.latency_s, cfg.length, cfg.rate));
    let activity = if bpm >= 90.0 { Activity::Walking } else { Activity::Sitting };
    let seg = |samples: Vec<f64>, channel| Segment {
        samples,
        rate: cfg.rate,
        channel,
        subject: "toy".into(),
        activity,
        origin: index * cfg.length,
    };
    SegmentPair { ppg: seg(ppg, Channel::Ppg), ecg: seg(ecg, Channel::Ecg) }
}

/// `cfg.pairs` pairs with heart rates uniform in `cfg.bpm`.
pub fn toy_pairs(cfg: &ToyConfig) -> Vec<SegmentPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.pairs)
        .map(|i| {
            let bpm = rng.gen_range(cfg.bpm.0..=cfg.bpm.1);
            let phase = rng.gen::<f64>();
            toy_pair(cfg, bpm, phase, i)
        })
        .collect()
}

/// Generator with three encoder stages of 16/32/64 filters.
pub fn toy_generator() -> GeneratorConfig {
    GeneratorConfig {
        encoder_filters: vec![16, 32, 64],
        encoder_strides: vec![2, 2, 2],
        ..GeneratorConfig::default()
    }
}

pub fn toy_discriminator() -> DiscriminatorConfig {
    DiscriminatorConfig { filters: vec![16, 32, 64], kernel_size: 16, stride: 2 }
}

/// Five-epoch schedule for the toy corpus.
pub fn toy_train_config(objective: Objective, seed: u64) -> TrainConfig {
    TrainConfig {
        generator: toy_generator(),
        discriminator: toy_discriminator(),
        lr_g: 1e-3,
        lr_d: 1e-4,
        batch_size: 16,
        epochs: 5,
        lr_constant_epochs: 2,
        seed,
        ..TrainConfig::standard(objective)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{detect_qrs, heart_rate};

    #[test]
    fn deterministic_and_scaled() {
        let cfg = ToyConfig { pairs: 8, ..ToyConfig::default() };
        let a = toy_pairs(&cfg);
        assert_eq!(a, toy_pairs(&cfg));
        for p in &a {
            assert_eq!(p.len(), 512);
            for s in [&p.ppg.samples, &p.ecg.samples] {
                let lo = s.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                assert!((lo + 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn target_heart_rate_is_recoverable() {
        let cfg = ToyConfig { length: 1280, ..ToyConfig::default() };
        for bpm in [50.0, 75.0, 118.0] {
            let p = toy_pair(&cfg, bpm, 0.3, 0);
            let hr = heart_rate(&detect_qrs(&p.ecg.samples, cfg.rate), cfg.rate).unwrap();
            assert!((hr - bpm).abs() < 2.0, "{bpm}: {hr}");
        }
    }
}
