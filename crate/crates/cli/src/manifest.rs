use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

pub const MANIFEST_FILE: &str = "manifest.jsonl";

/// One line of `manifest.jsonl`, appended once per command.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub fingerprint: Option<String>,
    pub inputs: Vec<PathBuf>,
    pub out: PathBuf,
    pub started_unix_s: u64,
    pub wall_clock_s: f64,
    pub seeds: Vec<u64>,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Collects what a command touched while it runs.
#[derive(Debug)]
pub struct Recorder {
    command: String,
    started: Instant,
    started_unix_s: u64,
    pub fingerprint: Option<String>,
    pub inputs: Vec<PathBuf>,
    pub seeds: Vec<u64>,
}

impl Recorder {
    pub fn new(command: &str) -> Self {
        Recorder {
            command: command.to_string(),
            started: Instant::now(),
            started_unix_s: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            fingerprint: None,
            inputs: Vec::new(),
            seeds: Vec::new(),
        }
    }

    pub fn input(&mut self, p: &Path) {
        self.inputs.push(p.to_path_buf());
    }

    pub fn finish(self, out: &Path, exit_code: i32, error: Option<String>) -> RunManifest {
        RunManifest {
            command: self.command,
            fingerprint: self.fingerprint,
            inputs: self.inputs,
            out: out.to_path_buf(),
            started_unix_s: self.started_unix_s,
            wall_clock_s: self.started.elapsed().as_secs_f64(),
            seeds: self.seeds,
            exit_code,
            error,
        }
    }
}

pub fn append(out: &Path, manifest: &RunManifest) -> std::io::Result<()> {
    fs::create_dir_all(out)?;
    let mut line = serde_json::to_string(manifest).map_err(std::io::Error::other)?;
    line.push('\n');
    fs::OpenOptions::new().create(true).append(true).open(out.join(MANIFEST_FILE))?.write_all(line.as_bytes())
}
