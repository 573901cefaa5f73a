use super::hr::{moving_average, samples};
use crate::signal::{butterworth, BandType, Sos};

const OFFSET: f64 = 0.02;

/// Elgendi systolic-peak detector: two moving averages over the squared,
/// clipped, bandpassed PPG delimit blocks of interest; each block long
/// enough to be a pulse contributes its maximum.
#[derive(Debug, Clone)]
pub struct PpgPeakDetector {
    bandpass: Sos,
    peak_window: usize,
    beat_window: usize,
    min_delay: usize,
}

impl PpgPeakDetector {
    pub fn new(rate: f64) -> Self {
        PpgPeakDetector {
            bandpass: butterworth(2, BandType::Bandpass(0.5, 8.0), rate),
            peak_window: samples(0.111, rate),
            beat_window: samples(0.667, rate),
            min_delay: samples(0.3, rate),
        }
    }

    pub fn detect(&self, ppg: &[f64]) -> Vec<usize> {
        if ppg.len() < 3 || ppg.iter().any(|v| !v.is_finite()) {
            return Vec::new();
        }
        let f = self.bandpass.filtfilt(ppg);
        let y: Vec<f64> = f.iter().map(|v| v.max(0.0).powi(2)).collect();
        let ma_peak = moving_average(&y, self.peak_window);
        let ma_beat = moving_average(&y, self.beat_window);
        let alpha = OFFSET * y.iter().sum::<f64>() / y.len() as f64;

        let mut peaks: Vec<usize> = Vec::new();
        let mut i = 0;
        while i < y.len() {
            if ma_peak[i] <= ma_beat[i] + alpha {
                i += 1;
                continue;
            }
            let start = i;
            while i < y.len() && ma_peak[i] > ma_beat[i] + alpha {
                i += 1;
            }
            if i - start < self.peak_window {
                continue;
            }
            let p = (start..i).max_by(|&a, &b| f[a].total_cmp(&f[b]).then(b.cmp(&a))).unwrap();
            match peaks.last_mut() {
                Some(last) if p - *last < self.min_delay => {
                    if f[p] > f[*last] {
                        *last = p;
                    }
                }
                _ => peaks.push(p),
            }
        }
        peaks
    }
}

pub fn detect_ppg_peaks(ppg: &[f64], rate: f64) -> Vec<usize> {
    PpgPeakDetector::new(rate).detect(ppg)
}
