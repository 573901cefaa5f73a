use serde::{Deserialize, Serialize};

use super::interchange::SubjectRecord;
use crate::signal::{
    minmax_scale, resample, segment, Activity, BandpassSpec, Segment, ZeroPhaseFilter, MODEL_RATE_HZ,
};
use crate::{Error, Result};

/// Time-aligned PPG and ECG windows from one subject.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentPair {
    pub ppg: Segment,
    pub ecg: Segment,
}

impl SegmentPair {
    pub fn subject(&self) -> &str {
        &self.ppg.subject
    }

    pub fn activity(&self) -> Activity {
        self.ppg.activity
    }

    pub fn origin(&self) -> usize {
        self.ppg.origin
    }

    pub fn len(&self) -> usize {
        self.ppg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ppg.is_empty()
    }
}

/// Per-subject bookkeeping of one `build_pairs` call.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub subject: String,
    pub resampled_len: usize,
    pub windows: usize,
    pub kept: usize,
    /// Windows dropped because the ECG was flat (sensor dropout).
    pub flat_ecg_excluded: usize,
}

/// Filters reused across subjects; designing them once keeps batch builds cheap.
#[derive(Debug, Clone)]
pub struct Preprocessor {
    ppg: ZeroPhaseFilter,
    ecg: ZeroPhaseFilter,
}

impl Preprocessor {
    pub fn new() -> Result<Self> {
        Self::with_specs(&BandpassSpec::ppg(), &BandpassSpec::ecg())
    }

    pub fn with_specs(ppg: &BandpassSpec, ecg: &BandpassSpec) -> Result<Self> {
        Ok(Preprocessor {
            ppg: ppg.design(MODEL_RATE_HZ)?,
            ecg: ecg.design(MODEL_RATE_HZ)?,
        })
    }

    /// Resample → segment → bandpass → scale, for both channels.
    pub fn build_pairs(
        &self,
        record: &SubjectRecord,
        window_s: f64,
        hop_s: f64,
    ) -> Result<(Vec<SegmentPair>, PairReport)> {
        if record.ppg.is_empty() || record.ecg.is_empty() {
            return Err(Error::EmptySignal);
        }
        let mut ppg = resample(&record.ppg, MODEL_RATE_HZ)?;
        let mut ecg = resample(&record.ecg, MODEL_RATE_HZ)?;
        let len = ppg.len().min(ecg.len());
        ppg.samples.truncate(len);
        ecg.samples.truncate(len);
        // labels come from the PPG clock for both channels
        ppg.activities.iter_mut().for_each(|iv| iv.end = iv.end.min(len));
        ppg.activities.retain(|iv| iv.start < iv.end);
        ecg.activities = ppg.activities.clone();

        let ppg_windows = segment(&ppg, window_s, hop_s)?;
        let ecg_windows = segment(&ecg, window_s, hop_s)?;
        debug_assert_eq!(ppg_windows.len(), ecg_windows.len());

        let mut report = PairReport {
            subject: record.subject.clone(),
            resampled_len: len,
            windows: ppg_windows.len(),
            ..Default::default()
        };
        let mut pairs = Vec::with_capacity(ppg_windows.len());
        for (p, e) in ppg_windows.into_iter().zip(ecg_windows) {
            if is_flat(&e.samples) {
                report.flat_ecg_excluded += 1;
                continue;
            }
            let ppg_seg = Segment {
                samples: minmax_scale(&self.ppg.apply(&p.samples)),
                ..p
            };
            let ecg_seg = Segment {
                samples: minmax_scale(&self.ecg.apply(&e.samples)),
                ..e
            };
            pairs.push(SegmentPair { ppg: ppg_seg, ecg: ecg_seg });
        }
        report.kept = pairs.len();
        Ok((pairs, report))
    }
}

fn is_flat(x: &[f64]) -> bool {
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    !(hi - lo > 1e-9 * hi.abs().max(lo.abs()).max(1.0))
}

/// Convenience wrapper around [`Preprocessor::build_pairs`] with the default filters.
pub fn build_pairs(record: &SubjectRecord, window_s: f64, hop_s: f64) -> Result<Vec<SegmentPair>> {
    Ok(Preprocessor::new()?.build_pairs(record, window_s, hop_s)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{segment_count, ActivityInterval, Channel, Waveform};
    use std::f64::consts::PI;

    fn record(seconds: usize, flat_ecg_from: Option<usize>) -> SubjectRecord {
        let ppg: Vec<f64> = (0..seconds * 64)
            .map(|i| (2.0 * PI * 1.2 * i as f64 / 64.0).sin())
            .collect();
        let ecg: Vec<f64> = (0..seconds * 700)
            .map(|i| {
                if flat_ecg_from.is_some_and(|s| i >= s * 700) {
                    0.0
                } else {
                    (2.0 * PI * 10.0 * i as f64 / 700.0).sin()
                }
            })
            .collect();
        SubjectRecord {
            subject: "S3".into(),
            ppg: Waveform::new(
                ppg,
                64.0,
                Channel::Ppg,
                "S3",
                vec![ActivityInterval { start: 0, end: 20 * 64, label: Activity::Walking }],
            )
            .unwrap(),
            ecg: Waveform::new(ecg, 700.0, Channel::Ecg, "S3", vec![]).unwrap(),
        }
    }

    #[test]
    fn pair_counts_follow_window_formula() {
        let rec = record(60, None);
        let pairs = build_pairs(&rec, 4.0, 2.0).unwrap();
        assert_eq!(pairs.len(), segment_count(60 * 128, 512, 256));
        let eval = build_pairs(&rec, 10.0, 2.0).unwrap();
        assert_eq!(eval.len(), segment_count(60 * 128, 1280, 256));
        for p in &pairs {
            assert_eq!(p.ppg.len(), 512);
            assert_eq!(p.ecg.len(), 512);
            assert_eq!(p.ppg.origin, p.ecg.origin);
            assert_eq!(p.ppg.activity, p.ecg.activity);
            assert_eq!(p.ppg.subject, p.ecg.subject);
            for s in [&p.ppg.samples, &p.ecg.samples] {
                let lo = s.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                assert_eq!((lo, hi), (-1.0, 1.0));
            }
        }
        assert_eq!(pairs[0].activity(), Activity::Walking);
        assert_eq!(pairs.last().unwrap().activity(), Activity::Transient);
    }

    #[test]
    fn flat_ecg_windows_are_excluded_and_counted() {
        let rec = record(40, Some(20));
        let (pairs, report) = Preprocessor::new().unwrap().build_pairs(&rec, 4.0, 2.0).unwrap();
        assert_eq!(report.windows, segment_count(40 * 128, 512, 256));
        assert!(report.flat_ecg_excluded > 0);
        assert_eq!(report.kept + report.flat_ecg_excluded, report.windows);
        assert_eq!(pairs.len(), report.kept);
    }

    #[test]
    fn preprocessing_is_bit_reproducible() {
        let rec = record(30, None);
        assert_eq!(build_pairs(&rec, 4.0, 2.0).unwrap(), build_pairs(&rec, 4.0, 2.0).unwrap());
    }
}
