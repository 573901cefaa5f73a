use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::trainer::{train, RunOptions, RunSummary, TrainConfig};
use crate::dataset::SegmentPair;
use crate::eval::{summarize, DistributionSummary};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRun {
    pub seed: u64,
    pub summary: Option<RunSummary>,
    pub error: Option<String>,
}

impl SweepRun {
    pub fn best_val_mape(&self) -> Option<f64> {
        self.summary.as_ref().and_then(|s| s.best_val_mape)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    /// Ordered as the requested seeds.
    pub runs: Vec<SweepRun>,
    /// Over the runs that produced a validation MAPE.
    pub distribution: Option<DistributionSummary>,
}

/// Independent runs of `config` for each seed, at most `jobs` at a time.
/// Run directories are `<out>/seed_<seed>`. A failed run is recorded and
/// the sweep continues.
pub fn seed_sweep(
    config: &TrainConfig,
    seeds: &[u64],
    train_pairs: &[SegmentPair],
    validation: Option<&[SegmentPair]>,
    out: Option<&Path>,
    jobs: usize,
) -> Result<SweepReport> {
    let mut sorted = seeds.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Config("sweep seeds must be distinct".into()));
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<SweepRun>>> = Mutex::new(vec![None; seeds.len()]);
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, seeds.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(&seed) = seeds.get(i) else { break };
                let cfg = TrainConfig { seed, ..config.clone() };
                let dir = out.map(|o| o.join(format!("seed_{seed}")));
                let opts = RunOptions { dir: dir.as_deref(), validation, ..Default::default() };
                let run = match train(&cfg, train_pairs, &opts) {
                    Ok(o) => SweepRun { seed, summary: Some(o.summary), error: None },
                    Err(e) => SweepRun { seed, summary: None, error: Some(e.to_string()) },
                };
                results.lock().expect("sweep results lock")[i] = Some(run);
            });
        }
    });
    let runs: Vec<SweepRun> = results.into_inner().expect("sweep results lock").into_iter().flatten().collect();
    let mapes: Vec<f64> = runs.iter().filter_map(SweepRun::best_val_mape).collect();
    Ok(SweepReport { distribution: (!mapes.is_empty()).then(|| summarize(&mapes)), runs })
}
