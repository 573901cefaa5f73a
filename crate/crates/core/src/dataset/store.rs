//! Binary store for preprocessed pairs: an 8-byte magic, a little-endian
//! u64 header length, a JSON header with per-pair metadata, then for every
//! pair the PPG and ECG windows as little-endian f32.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::pairs::SegmentPair;
use crate::signal::{Activity, Channel, Segment};
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"P2EPAIR1";

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PairMeta {
    subject: String,
    activity: Activity,
    origin: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StoreHeader {
    window: usize,
    rate_hz: f64,
    pairs: Vec<PairMeta>,
}

pub fn save_pairs(path: impl AsRef<Path>, pairs: &[SegmentPair]) -> Result<()> {
    let path = path.as_ref();
    let window = pairs.first().map_or(0, |p| p.len());
    let rate_hz = pairs.first().map_or(crate::signal::MODEL_RATE_HZ, |p| p.ppg.rate);
    if pairs.iter().any(|p| p.ppg.len() != window || p.ecg.len() != window) {
        return Err(Error::Shape("all pairs in a store must share one window length".into()));
    }
    let header = StoreHeader {
        window,
        rate_hz,
        pairs: pairs
            .iter()
            .map(|p| PairMeta {
                subject: p.subject().to_string(),
                activity: p.activity(),
                origin: p.origin(),
            })
            .collect(),
    };
    let header = serde_json::to_vec(&header)?;
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    w.write_all(MAGIC).map_err(io)?;
    w.write_all(&(header.len() as u64).to_le_bytes()).map_err(io)?;
    w.write_all(&header).map_err(io)?;
    for p in pairs {
        for v in p.ppg.samples.iter().chain(&p.ecg.samples) {
            w.write_all(&(*v as f32).to_le_bytes()).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

pub fn load_pairs(path: impl AsRef<Path>) -> Result<Vec<SegmentPair>> {
    let path = path.as_ref();
    let corrupt = |reason: &str| Error::Corrupt {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < 16 || &bytes[..8] != MAGIC {
        return Err(corrupt("bad magic"));
    }
    let hlen = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let body = bytes.get(16..16 + hlen).ok_or_else(|| corrupt("truncated header"))?;
    let header: StoreHeader = serde_json::from_slice(body).map_err(|e| corrupt(&e.to_string()))?;
    let data = &bytes[16 + hlen..];
    let per_pair = header.window * 2 * 4;
    if data.len() != per_pair * header.pairs.len() {
        return Err(corrupt("payload size does not match header"));
    }
    let floats: Vec<f64> = data
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    Ok(header
        .pairs
        .into_iter()
        .enumerate()
        .map(|(i, m)| {
            let base = i * header.window * 2;
            let seg = |channel, offset: usize| Segment {
                samples: floats[base + offset..base + offset + header.window].to_vec(),
                rate: header.rate_hz,
                channel,
                subject: m.subject.clone(),
                activity: m.activity,
                origin: m.origin,
            };
            SegmentPair {
                ppg: seg(Channel::Ppg, 0),
                ecg: seg(Channel::Ecg, header.window),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_preserves_f32_values() {
        let mk = |channel, v: f64| Segment {
            samples: vec![v, -v, 0.25],
            rate: 128.0,
            channel,
            subject: "S9".into(),
            activity: Activity::Stairs,
            origin: 42,
        };
        let pairs = vec![SegmentPair { ppg: mk(Channel::Ppg, 0.5), ecg: mk(Channel::Ecg, 0.75) }];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.pairs");
        save_pairs(&path, &pairs).unwrap();
        assert_eq!(load_pairs(&path).unwrap(), pairs);

        fs::write(&path, b"garbage!").unwrap();
        assert!(matches!(load_pairs(&path), Err(Error::Corrupt { .. })));
    }
}
