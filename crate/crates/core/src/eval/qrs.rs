use std::collections::VecDeque;

use super::hr::{median, moving_average, samples};
use crate::signal::{butterworth, BandType, Sos};

const BUFFER: usize = 8;
const THRESHOLD_FRACTION: f64 = 0.475;

/// Hamilton-style R-peak detector.
///
/// The ECG is bandpassed to 8–16 Hz, differentiated, rectified and
/// smoothed over 80 ms. Local maxima that dominate ±200 ms become
/// candidates and are classified against an adaptive threshold built from
/// the medians of recent QRS and noise peak heights. Missed beats are
/// recovered by searchback at half threshold, T waves are rejected by
/// slope, and detections are moved to the largest sample within ±100 ms.
#[derive(Debug, Clone)]
pub struct QrsDetector {
    rate: f64,
    bandpass: Sos,
    smooth: usize,
    dominance: usize,
    refractory: usize,
    twave: usize,
    refine: usize,
}

impl QrsDetector {
    pub fn new(rate: f64) -> Self {
        QrsDetector {
            rate,
            bandpass: butterworth(2, BandType::Bandpass(8.0, 16.0), rate),
            smooth: samples(0.08, rate),
            dominance: samples(0.2, rate),
            refractory: samples(0.2, rate),
            twave: samples(0.36, rate),
            refine: samples(0.1, rate),
        }
    }

    /// Strictly increasing R-peak indices at least 200 ms apart.
    pub fn detect(&self, ecg: &[f64]) -> Vec<usize> {
        let n = ecg.len();
        if n < 3 || ecg.iter().any(|v| !v.is_finite()) {
            return Vec::new();
        }
        let filtered = self.bandpass.filtfilt(ecg);
        let mut slope = vec![0.0; n];
        for i in 1..n {
            slope[i] = (filtered[i] - filtered[i - 1]).abs();
        }
        let ma = moving_average(&slope, self.smooth);
        let candidates = dominant_peaks(&ma, self.dominance);
        if candidates.is_empty() {
            return Vec::new();
        }
        let max_slope = |i: usize| {
            let lo = i.saturating_sub(self.smooth);
            let hi = (i + self.smooth + 1).min(n);
            slope[lo..hi].iter().cloned().fold(0.0, f64::max)
        };

        let (mut qrs_buf, mut noise_buf) = self.initial_buffers(&ma);
        let mut dt = threshold(&qrs_buf, &noise_buf);

        let mut beats: Vec<usize> = Vec::new();
        let mut rr: VecDeque<f64> = VecDeque::new();
        let mut pending: Vec<usize> = Vec::new();
        let push = |buf: &mut VecDeque<f64>, v: f64| {
            if buf.len() == BUFFER {
                buf.pop_front();
            }
            buf.push_back(v);
        };

        for &p in &candidates {
            if let (Some(&last), false) = (beats.last(), rr.is_empty()) {
                let rr_med = median(&rr.iter().copied().collect::<Vec<_>>());
                if (p - last) as f64 > 1.5 * rr_med {
                    let best = pending
                        .iter()
                        .copied()
                        .filter(|&c| c >= last + self.refractory && ma[c] > 0.5 * dt)
                        .max_by(|&a, &b| ma[a].total_cmp(&ma[b]));
                    if let Some(b) = best {
                        push(&mut rr, (b - last) as f64);
                        push(&mut qrs_buf, ma[b]);
                        beats.push(b);
                        pending.retain(|&c| c > b);
                        dt = threshold(&qrs_buf, &noise_buf);
                    }
                }
            }

            let mut is_qrs = ma[p] > dt;
            if is_qrs {
                if let Some(&last) = beats.last() {
                    let gap = p - last;
                    if gap < self.refractory || (gap < self.twave && max_slope(p) < 0.5 * max_slope(last)) {
                        is_qrs = false;
                    }
                }
            }
            if is_qrs {
                if let Some(&last) = beats.last() {
                    push(&mut rr, (p - last) as f64);
                }
                push(&mut qrs_buf, ma[p]);
                beats.push(p);
                pending.clear();
            } else {
                push(&mut noise_buf, ma[p]);
                pending.push(p);
            }
            dt = threshold(&qrs_buf, &noise_buf);
        }

        self.refine(ecg, &beats)
    }

    /// QRS buffer from 1 s block maxima over the first 8 s; noise buffer
    /// from the block means.
    fn initial_buffers(&self, ma: &[f64]) -> (VecDeque<f64>, VecDeque<f64>) {
        let block = samples(1.0, self.rate).min(ma.len());
        let blocks = (ma.len() / block).clamp(1, BUFFER);
        let mut q = VecDeque::with_capacity(BUFFER);
        let mut z = VecDeque::with_capacity(BUFFER);
        for chunk in ma.chunks(block).take(blocks) {
            q.push_back(chunk.iter().cloned().fold(0.0, f64::max));
            z.push_back(chunk.iter().sum::<f64>() / chunk.len() as f64);
        }
        (q, z)
    }

    fn refine(&self, ecg: &[f64], beats: &[usize]) -> Vec<usize> {
        let n = ecg.len();
        let mut peaks: Vec<usize> = beats
            .iter()
            .map(|&b| {
                let lo = b.saturating_sub(self.refine);
                let hi = (b + self.refine + 1).min(n);
                (lo..hi).max_by(|&i, &j| ecg[i].total_cmp(&ecg[j]).then(j.cmp(&i))).unwrap()
            })
            .collect();
        peaks.sort_unstable();
        let mut out: Vec<usize> = Vec::with_capacity(peaks.len());
        for p in peaks {
            match out.last_mut() {
                Some(last) if p - *last < self.refractory => {
                    if ecg[p] > ecg[*last] {
                        *last = p;
                    }
                }
                _ => out.push(p),
            }
        }
        out
    }
}

/// `ANP + 0.475·(AQRSP − ANP)` from the buffer medians.
fn threshold(qrs: &VecDeque<f64>, noise: &VecDeque<f64>) -> f64 {
    let anp = median(&noise.iter().copied().collect::<Vec<_>>());
    let aqrsp = median(&qrs.iter().copied().collect::<Vec<_>>());
    anp + THRESHOLD_FRACTION * (aqrsp - anp)
}

/// Indices holding the strict maximum of `x` over `±radius`, ignoring
/// non-positive values. Plateaus yield their first index.
fn dominant_peaks(x: &[f64], radius: usize) -> Vec<usize> {
    let n = x.len();
    (0..n)
        .filter(|&i| {
            let v = x[i];
            if v <= 0.0 {
                return false;
            }
            let lo = i.saturating_sub(radius);
            let hi = (i + radius + 1).min(n);
            x[lo..i].iter().all(|&u| u < v) && x[i + 1..hi].iter().all(|&u| u <= v)
        })
        .collect()
}

pub fn detect_qrs(ecg: &[f64], rate: f64) -> Vec<usize> {
    QrsDetector::new(rate).detect(ecg)
}
