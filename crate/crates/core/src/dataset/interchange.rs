//! Interchange format v1: one directory per subject holding `meta.json`,
//! `ppg.f32le` and `ecg.f32le`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::signal::{Activity, ActivityInterval, Channel, Waveform};
use crate::{Error, Result};

pub const META_FILE: &str = "meta.json";
pub const PPG_FILE: &str = "ppg.f32le";
pub const ECG_FILE: &str = "ecg.f32le";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelMeta {
    pub rate_hz: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivityMeta {
    pub start_s: f64,
    pub end_s: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectMeta {
    pub subject: String,
    pub channels: BTreeMap<String, ChannelMeta>,
    #[serde(default)]
    pub activities: Vec<ActivityMeta>,
    /// Free-form converter notes; ignored by the loader.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

/// One subject's synchronised PPG and ECG recordings.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectRecord {
    pub subject: String,
    pub ppg: Waveform,
    pub ecg: Waveform,
}

fn malformed(path: &Path, reason: impl Into<String>) -> Error {
    Error::MalformedMetadata {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn read_channel(path: &Path, expected: usize) -> Result<Vec<f64>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() != expected * 4 {
        return Err(Error::TruncatedChannel {
            path: path.to_path_buf(),
            expected,
            found_bytes: bytes.len() as u64,
        });
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect())
}

fn intervals(meta: &[ActivityMeta], rate: f64, len: usize, path: &Path) -> Result<Vec<ActivityInterval>> {
    let mut out = Vec::with_capacity(meta.len());
    for a in meta {
        let label: Activity = a.label.parse().map_err(|_| malformed(path, format!("unknown activity label {:?}", a.label)))?;
        if !(a.start_s >= 0.0 && a.end_s > a.start_s) {
            return Err(malformed(path, format!("bad activity span {}..{}", a.start_s, a.end_s)));
        }
        let start = ((a.start_s * rate).round() as usize).min(len);
        let end = ((a.end_s * rate).round() as usize).min(len);
        if start < end {
            out.push(ActivityInterval { start, end, label });
        }
    }
    out.sort_by_key(|iv| iv.start);
    Ok(out)
}

/// Reads and validates one subject directory.
pub fn load_subject(dir: impl AsRef<Path>) -> Result<SubjectRecord> {
    let dir = dir.as_ref();
    let meta_path = dir.join(META_FILE);
    if !meta_path.is_file() {
        return Err(Error::MissingMetadata(meta_path));
    }
    let text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    let meta: SubjectMeta = serde_json::from_str(&text).map_err(|e| malformed(&meta_path, e.to_string()))?;

    let channel = |name: &str| -> Result<&ChannelMeta> {
        let c = meta
            .channels
            .get(name)
            .ok_or_else(|| malformed(&meta_path, format!("missing channel {name:?}")))?;
        if !(c.rate_hz > 0.0 && c.rate_hz.is_finite()) {
            return Err(malformed(&meta_path, format!("channel {name:?} has rate {}", c.rate_hz)));
        }
        if c.count == 0 {
            return Err(malformed(&meta_path, format!("channel {name:?} is empty")));
        }
        Ok(c)
    };
    let ppg_meta = channel("ppg")?;
    let ecg_meta = channel("ecg")?;

    let ppg_span = ppg_meta.count as f64 / ppg_meta.rate_hz;
    let ecg_span = ecg_meta.count as f64 / ecg_meta.rate_hz;
    if (ppg_span - ecg_span).abs() > 1.0 / ppg_meta.rate_hz {
        return Err(Error::RateMismatch {
            subject: meta.subject.clone(),
            reason: format!(
                "ppg covers {ppg_span:.4} s at {} Hz but ecg covers {ecg_span:.4} s at {} Hz",
                ppg_meta.rate_hz, ecg_meta.rate_hz
            ),
        });
    }

    let ppg_samples = read_channel(&dir.join(PPG_FILE), ppg_meta.count)?;
    let ecg_samples = read_channel(&dir.join(ECG_FILE), ecg_meta.count)?;

    let ppg_iv = intervals(&meta.activities, ppg_meta.rate_hz, ppg_meta.count, &meta_path)?;
    let ecg_iv = intervals(&meta.activities, ecg_meta.rate_hz, ecg_meta.count, &meta_path)?;
    let wave = |samples, rate, channel, iv| {
        Waveform::new(samples, rate, channel, meta.subject.clone(), iv)
            .map_err(|e| malformed(&meta_path, e.to_string()))
    };
    Ok(SubjectRecord {
        ppg: wave(ppg_samples, ppg_meta.rate_hz, Channel::Ppg, ppg_iv)?,
        ecg: wave(ecg_samples, ecg_meta.rate_hz, Channel::Ecg, ecg_iv)?,
        subject: meta.subject,
    })
}

fn write_channel(path: &Path, samples: &[f64]) -> Result<()> {
    let mut buf = Vec::with_capacity(samples.len() * 4);
    for &v in samples {
        buf.extend_from_slice(&(v as f32).to_le_bytes());
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&buf).map_err(|e| Error::io(path, e))
}

/// Writes a subject in interchange format; activities are taken from the PPG channel.
pub fn write_subject(dir: impl AsRef<Path>, record: &SubjectRecord) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let rate = record.ppg.rate;
    let meta = SubjectMeta {
        subject: record.subject.clone(),
        channels: BTreeMap::from([
            ("ppg".to_string(), ChannelMeta { rate_hz: record.ppg.rate, count: record.ppg.len() }),
            ("ecg".to_string(), ChannelMeta { rate_hz: record.ecg.rate, count: record.ecg.len() }),
        ]),
        activities: record
            .ppg
            .activities
            .iter()
            .map(|iv| ActivityMeta {
                start_s: iv.start as f64 / rate,
                end_s: iv.end as f64 / rate,
                label: iv.label.as_str().to_string(),
            })
            .collect(),
        provenance: None,
    };
    let meta_path = dir.join(META_FILE);
    fs::write(&meta_path, serde_json::to_string_pretty(&meta)?).map_err(|e| Error::io(&meta_path, e))?;
    write_channel(&dir.join(PPG_FILE), &record.ppg.samples)?;
    write_channel(&dir.join(ECG_FILE), &record.ecg.samples)?;
    Ok(dir.to_path_buf())
}

/// Subject directories (those holding a `meta.json`) directly under `root`, sorted.
pub fn discover_subjects(root: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let root = root.as_ref();
    let mut dirs: Vec<PathBuf> = fs::read_dir(root)
        .map_err(|e| Error::io(root, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join(META_FILE).is_file())
        .collect();
    dirs.sort();
    Ok(dirs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(seconds: usize) -> SubjectRecord {
        let ppg: Vec<f64> = (0..seconds * 64).map(|i| (i as f64 * 0.1).sin()).collect();
        let ecg: Vec<f64> = (0..seconds * 700).map(|i| (i as f64 * 0.01).cos()).collect();
        SubjectRecord {
            subject: "S1".into(),
            ppg: Waveform::new(
                ppg,
                64.0,
                Channel::Ppg,
                "S1",
                vec![ActivityInterval { start: 64, end: 128, label: Activity::Sitting }],
            )
            .unwrap(),
            ecg: Waveform::new(ecg, 700.0, Channel::Ecg, "S1", vec![]).unwrap(),
        }
    }

    #[test]
    fn write_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let rec = record(10);
        write_subject(dir.path(), &rec).unwrap();
        let back = load_subject(dir.path()).unwrap();
        assert_eq!(back.ppg.len(), 640);
        assert_eq!(back.ecg.len(), 7000);
        assert_eq!(back.ppg.rate, 64.0);
        assert_eq!(back.ecg.rate, 700.0);
        assert_eq!(back.ecg.activities[0].start, 700);
        assert_eq!(back.ppg.samples[3], rec.ppg.samples[3] as f32 as f64);
    }

    #[test]
    fn empty_directory_is_missing_metadata() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_subject(dir.path()).unwrap_err();
        assert!(err.to_string().starts_with("missing metadata"), "{err}");
    }

    #[test]
    fn truncated_channel_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        write_subject(dir.path(), &record(4)).unwrap();
        let path = dir.path().join(ECG_FILE);
        let mut bytes = fs::read(&path).unwrap();
        bytes.pop();
        fs::write(&path, bytes).unwrap();
        let err = load_subject(dir.path()).unwrap_err();
        assert!(matches!(err, Error::TruncatedChannel { expected: 2800, .. }));
        assert!(err.to_string().contains("truncated channel: expected 2800 samples"));
    }

    #[test]
    fn span_mismatch_is_rate_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        write_subject(dir.path(), &record(4)).unwrap();
        let meta_path = dir.path().join(META_FILE);
        let text = fs::read_to_string(&meta_path).unwrap().replace("700.0", "350.0");
        fs::write(&meta_path, text).unwrap();
        assert!(matches!(load_subject(dir.path()), Err(Error::RateMismatch { .. })));
    }

    #[test]
    fn malformed_json_is_distinct() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(META_FILE), "{ not json").unwrap();
        assert!(matches!(load_subject(dir.path()), Err(Error::MalformedMetadata { .. })));
    }
}
