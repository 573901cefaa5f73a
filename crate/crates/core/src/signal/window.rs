use super::{Segment, Waveform};
use crate::{Error, Result};

/// Number of windows of length `window` with stride `hop` that fit in `len` samples.
pub fn segment_count(len: usize, window: usize, hop: usize) -> usize {
    if window == 0 || hop == 0 || len < window {
        0
    } else {
        (len - window) / hop + 1
    }
}

fn seconds_to_samples(seconds: f64, rate: f64, what: &str) -> Result<usize> {
    let n = seconds * rate;
    if !(n > 0.0) || (n - n.round()).abs() > 1e-9 {
        return Err(Error::InvalidWindow(format!(
            "{what} of {seconds} s is not a whole number of samples at {rate} Hz"
        )));
    }
    Ok(n.round() as usize)
}

/// Cuts overlapping windows; window `i` starts at `i * hop` and is labelled
/// with the activity covering its midpoint.
pub fn segment(w: &Waveform, window_s: f64, hop_s: f64) -> Result<Vec<Segment>> {
    let window = seconds_to_samples(window_s, w.rate, "window")?;
    let hop = seconds_to_samples(hop_s, w.rate, "hop")?;
    if hop > window {
        return Err(Error::InvalidWindow(format!(
            "hop ({hop_s} s) longer than window ({window_s} s)"
        )));
    }
    let count = segment_count(w.len(), window, hop);
    Ok((0..count)
        .map(|i| {
            let start = i * hop;
            Segment {
                samples: w.samples[start..start + window].to_vec(),
                rate: w.rate,
                channel: w.channel,
                subject: w.subject.clone(),
                activity: w.activity_at(start + window / 2),
                origin: start,
            }
        })
        .collect())
}

/// Affine map onto `[-1, 1]`. A constant input maps to all zeros.
pub fn minmax_scale(x: &[f64]) -> Vec<f64> {
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = hi - lo;
    if !(range > 0.0) || !range.is_finite() {
        return vec![0.0; x.len()];
    }
    x.iter().map(|v| 2.0 * ((v - lo) / range) - 1.0).collect()
}

pub fn minmax_scale_segment(seg: &Segment) -> Segment {
    Segment {
        samples: minmax_scale(&seg.samples),
        ..seg.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{Activity, ActivityInterval, Channel};
    use proptest::prelude::*;

    fn wave(len: usize) -> Waveform {
        Waveform::new((0..len).map(|i| i as f64).collect(), 128.0, Channel::Ppg, "S1", vec![])
            .unwrap()
    }

    #[test]
    fn count_and_offsets() {
        let segs = segment(&wave(1024), 4.0, 2.0).unwrap();
        assert_eq!(segs.len(), 3);
        assert_eq!(segs.iter().map(|s| s.origin).collect::<Vec<_>>(), vec![0, 256, 512]);
        assert!(segs.iter().all(|s| s.len() == 512));
        assert_eq!(segs[1].samples[0], 256.0);
        assert!(segment(&wave(511), 4.0, 2.0).unwrap().is_empty());
    }

    #[test]
    fn midpoint_label() {
        let mut w = wave(1024);
        w.activities = vec![
            ActivityInterval { start: 0, end: 300, label: Activity::Sitting },
            ActivityInterval { start: 600, end: 1024, label: Activity::Walking },
        ];
        let labels: Vec<_> = segment(&w, 4.0, 2.0).unwrap().iter().map(|s| s.activity).collect();
        // midpoints 256, 512, 768
        assert_eq!(labels, vec![Activity::Sitting, Activity::Transient, Activity::Walking]);
    }

    #[test]
    fn fractional_windows_rejected() {
        assert!(segment(&wave(1024), 4.001, 2.0).is_err());
        assert!(segment(&wave(1024), 2.0, 4.0).is_err());
    }

    #[test]
    fn scaling_examples() {
        assert_eq!(minmax_scale(&[0.0, 5.0, 10.0]), vec![-1.0, 0.0, 1.0]);
        assert_eq!(minmax_scale(&[-1.0, 1.0]), vec![-1.0, 1.0]);
        assert_eq!(minmax_scale(&[3.0, 3.0, 3.0]), vec![0.0, 0.0, 0.0]);
    }

    proptest! {
        #[test]
        fn count_formula_matches_enumeration(len in 0usize..100_000, window in 1usize..2000, hop_frac in 1usize..=100) {
            let hop = (window * hop_frac / 100).max(1);
            let mut starts = 0;
            let mut s = 0;
            while s + window <= len {
                starts += 1;
                s += hop;
            }
            prop_assert_eq!(segment_count(len, window, hop), starts);
        }

        #[test]
        fn scale_bounds_and_idempotence(x in prop::collection::vec(-1e3f64..1e3, 2..200)) {
            let y = minmax_scale(&x);
            let lo = y.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let constant = x.iter().all(|v| *v == x[0]);
            if constant {
                prop_assert!(y.iter().all(|v| *v == 0.0));
            } else {
                prop_assert_eq!(lo, -1.0);
                prop_assert_eq!(hi, 1.0);
                let z = minmax_scale(&y);
                for (a, b) in y.iter().zip(&z) {
                    prop_assert!((a - b).abs() < 1e-12);
                }
                // monotone: order of samples preserved
                for i in 0..x.len() {
                    for j in 0..x.len() {
                        if x[i] < x[j] {
                            prop_assert!(y[i] <= y[j]);
                        }
                    }
                }
            }
        }
    }
}
