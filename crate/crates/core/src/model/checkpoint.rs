use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::tensor::Tensor;
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"P2ECKPT1";

/// Hex SHA-256 of the JSON encoding of `config`.
pub fn fingerprint<T: Serialize>(config: &T) -> String {
    let json = serde_json::to_vec(config).expect("config serialises");
    hex::encode(Sha256::digest(&json))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorEntry {
    pub name: String,
    pub shape: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub fingerprint: String,
    pub epoch: usize,
    pub iteration: u64,
    /// Free-form state stored alongside the tensors.
    pub meta: serde_json::Value,
    pub entries: Vec<TensorEntry>,
    pub data_sha256: String,
}

/// Named tensors plus a JSON header, stored as
/// `magic | u64 header length | header | f64 LE data`.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub fingerprint: String,
    pub epoch: usize,
    pub iteration: u64,
    pub meta: serde_json::Value,
    pub tensors: Vec<(String, Tensor)>,
}

impl Checkpoint {
    pub fn tensor(&self, name: &str) -> Option<&Tensor> {
        self.tensors.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    /// Tensors whose names start with `prefix`, with the prefix removed.
    pub fn with_prefix<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = (&'a str, &'a Tensor)> + 'a {
        self.tensors
            .iter()
            .filter_map(move |(n, t)| n.strip_prefix(prefix).map(|s| (s, t)))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut data = Vec::with_capacity(8 * self.tensors.iter().map(|(_, t)| t.numel()).sum::<usize>());
        for (_, t) in &self.tensors {
            for v in &t.data {
                data.extend_from_slice(&v.to_le_bytes());
            }
        }
        let header = CheckpointHeader {
            fingerprint: self.fingerprint.clone(),
            epoch: self.epoch,
            iteration: self.iteration,
            meta: self.meta.clone(),
            entries: self
                .tensors
                .iter()
                .map(|(n, t)| TensorEntry { name: n.clone(), shape: t.shape.clone() })
                .collect(),
            data_sha256: hex::encode(Sha256::digest(&data)),
        };
        let header = serde_json::to_vec(&header)?;
        let mut bytes = Vec::with_capacity(16 + header.len() + data.len());
        bytes.extend_from_slice(MAGIC);
        bytes.extend_from_slice(&(header.len() as u64).to_le_bytes());
        bytes.extend_from_slice(&header);
        bytes.extend_from_slice(&data);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }

    /// Loads a checkpoint; when `expected` is given the stored fingerprint
    /// must equal it.
    pub fn load(path: &Path, expected: Option<&str>) -> Result<Checkpoint> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let corrupt = |reason: &str| Error::Corrupt { path: path.to_path_buf(), reason: reason.to_string() };
        if bytes.len() < 16 || &bytes[..8] != MAGIC {
            return Err(corrupt("bad magic"));
        }
        let hlen = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
        let body = bytes.get(16..).ok_or_else(|| corrupt("truncated header"))?;
        if hlen > body.len() {
            return Err(corrupt("truncated header"));
        }
        let header: CheckpointHeader =
            serde_json::from_slice(&body[..hlen]).map_err(|e| corrupt(&format!("header: {e}")))?;
        if let Some(exp) = expected {
            if header.fingerprint != exp {
                return Err(Error::FingerprintMismatch {
                    expected: exp.to_string(),
                    found: header.fingerprint,
                });
            }
        }
        let data = &body[hlen..];
        let total: usize = header.entries.iter().map(|e| e.shape.iter().product::<usize>()).sum();
        if data.len() != total * 8 {
            return Err(corrupt(&format!("expected {} data bytes, found {}", total * 8, data.len())));
        }
        if hex::encode(Sha256::digest(data)) != header.data_sha256 {
            return Err(corrupt("data checksum mismatch"));
        }
        let mut values = data.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap()));
        let tensors = header
            .entries
            .iter()
            .map(|e| {
                let n = e.shape.iter().product();
                let t = Tensor { shape: e.shape.clone(), data: values.by_ref().take(n).collect() };
                (e.name.clone(), t)
            })
            .collect();
        Ok(Checkpoint {
            fingerprint: header.fingerprint,
            epoch: header.epoch,
            iteration: header.iteration,
            meta: header.meta,
            tensors,
        })
    }
}
